import csv
import json
from pathlib import Path
import tempfile
import unittest
from unittest import mock

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

tmp = Path(tempfile.gettempdir())


def small_config():
    from equipair.model import EncoderConfig

    return EncoderConfig(k_small=4, k_large=8, widths=(6, 8, 10), depth=2, head_width=8)


def small_pairs(count=4, seed=0):
    from equipair.data.synthetic import gen_synthetic

    manifest, pairs = gen_synthetic("all", count, seed=seed, num_points=64)
    by_id = {p.pair_id: p for p in pairs}
    return [by_id[i] for i in manifest.train], [by_id[i] for i in manifest.test]


def prediction(R, T):
    from equipair.autodiff import Variable
    from equipair.model import PosePrediction

    return PosePrediction(Variable(R), Variable(T), None, None, None)


class TestConfigs(unittest.TestCase):

    def test_defaults(self):
        from equipair.train import LossConfig, TrainConfig

        cfg = TrainConfig()
        self.assertEqual((cfg.batch_size, cfg.learning_rate, cfg.epochs), (4, 1e-4, 1000))
        self.assertEqual((cfg.beta1, cfg.beta2, cfg.eps), (0.9, 0.999, 1e-8))
        self.assertEqual(LossConfig().to_dict(), {"lambda_rot": 1.0, "lambda_trans": 1.0, "symmetry_aware": True})

    def test_invalid(self):
        from equipair.core.errors import ContractViolation
        from equipair.train import LossConfig, TrainConfig

        with self.assertRaises(ContractViolation):
            LossConfig(0.0, 0.0)
        with self.assertRaises(ContractViolation):
            LossConfig(-1.0, 1.0)
        for kwargs in ({"batch_size": 0}, {"learning_rate": -1.0}, {"epochs": 0}, {"beta1": 1.0}):
            with self.assertRaises(ContractViolation):
                TrainConfig(**kwargs)
        with self.assertRaises(ContractViolation):
            TrainConfig.from_dict({"lr": 0.1})


class TestLoss(unittest.TestCase):

    def test_zero_at_truth(self):
        from equipair.geometry import RigidTransform, random_rotation
        from equipair.train import LossConfig
        from equipair.train.loss import loss

        T = np.array([0.5, -1.0, 2.0])
        self.assertEqual(loss(prediction(np.eye(3), T), RigidTransform(np.eye(3), T), LossConfig()).item(), 0.0)
        R = random_rotation(0)
        self.assertLess(loss(prediction(R, T), RigidTransform(R, T), LossConfig()).item(), 1e-7)

    def test_half_turn_is_pi(self):
        from equipair.geometry import RigidTransform, axis_rotation
        from equipair.train import LossConfig
        from equipair.train.loss import loss

        value = loss(prediction(axis_rotation("z", np.pi), np.zeros(3)), RigidTransform.identity(), LossConfig())
        self.assertAlmostEqual(value.item(), np.pi)

    def test_weights_and_l1(self):
        from equipair.geometry import RigidTransform
        from equipair.train import LossConfig
        from equipair.train.loss import loss

        value = loss(prediction(np.eye(3), [0.3, 0.0, -0.6]), RigidTransform.identity(), LossConfig(1.0, 2.0))
        self.assertAlmostEqual(value.item(), 2.0 * 0.3)

    def test_symmetry_aware_target(self):
        from equipair.geometry import RigidTransform, SymmetryGroup, axis_rotation, random_rotation
        from equipair.train import LossConfig
        from equipair.train.loss import loss

        R_gt = random_rotation(1)
        pred = prediction(axis_rotation("z", 0.7) @ R_gt, np.zeros(3))
        gt = RigidTransform(R_gt, np.zeros(3))
        sym = SymmetryGroup("z")
        self.assertLess(loss(pred, gt, LossConfig(), sym).item(), 1e-6)
        plain = loss(pred, gt, LossConfig(symmetry_aware=False), sym).item()
        self.assertAlmostEqual(plain, 0.7)

    def test_gradient_matches_finite_differences(self):
        from equipair.autodiff import Variable
        from equipair.autodiff.gradcheck import check_gradients
        from equipair.geometry import RigidTransform, random_rotation
        from equipair.model import compose_pose
        from equipair.train import LossConfig
        from equipair.train.loss import loss

        rng = np.random.default_rng(2)
        heads = {
            "t_hat": Variable(rng.normal(size=3), name="t_hat"),
            "v1": Variable(rng.normal(size=3), name="v1"),
            "v2": Variable(rng.normal(size=3), name="v2"),
        }
        centroid = rng.normal(size=3)
        gt = RigidTransform(random_rotation(rng), rng.normal(size=3))

        def fn():
            pred = compose_pose(heads["t_hat"], heads["v1"], heads["v2"], centroid)
            return loss(pred, gt, LossConfig())

        report = check_gradients(fn, heads)
        self.assertTrue(report.ok, str(report))
        self.assertEqual(report.checked + report.skipped, 9)
        self.assertLessEqual(report.max_rel_error, 1e-4)


class TestAdam(unittest.TestCase):

    def test_zero_gradient_keeps_params(self):
        from equipair.train import TrainConfig
        from equipair.train.optim import AdamState, adam_step

        params = {"w": np.array([1.0, -2.0])}
        new, state = adam_step(params, {"w": np.zeros(2)}, AdamState.fresh(params), TrainConfig())
        assert_array_equal(new["w"], params["w"])
        self.assertEqual(state.step, 1)

    def test_first_step_is_lr_times_sign(self):
        from equipair.train import TrainConfig
        from equipair.train.optim import AdamState, adam_step

        cfg = TrainConfig(learning_rate=0.01)
        params = {"w": np.zeros(3)}
        g = np.array([0.5, -3.0, 1e-3])
        new, _ = adam_step(params, {"w": g}, AdamState.fresh(params), cfg)
        assert_allclose(new["w"], -cfg.learning_rate * g / (np.abs(g) + cfg.eps))
        assert_allclose(new["w"], -0.01 * np.sign(g), rtol=1e-4)

    def test_missing_gradient_counts_as_zero(self):
        from equipair.train import TrainConfig
        from equipair.train.optim import AdamState, adam_step

        params = {"w": np.ones(2), "u": np.ones(2)}
        new, _ = adam_step(params, {"w": np.ones(2), "u": None}, AdamState.fresh(params), TrainConfig())
        assert_array_equal(new["u"], params["u"])

    def test_nan_names_parameter(self):
        from equipair.core.errors import NumericFault
        from equipair.train import TrainConfig
        from equipair.train.optim import AdamState, adam_step

        params = {"head.W": np.ones(2)}
        with self.assertRaises(NumericFault) as cm:
            adam_step(params, {"head.W": np.array([np.nan, 0.0])}, AdamState.fresh(params), TrainConfig())
        self.assertEqual(cm.exception.param, "head.W")
        self.assertIn("head.W", str(cm.exception))


class TestTrainBranch(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.train_pairs, cls.test_pairs = small_pairs()

    def _train(self, which, epochs=2, params=None, seed=0):
        from equipair.train import LossConfig, TrainConfig
        from equipair.train.trainer import train_branch

        cfg = TrainConfig(epochs=epochs, batch_size=2, learning_rate=1e-3, seed=seed)
        return train_branch(which, self.train_pairs, cfg, LossConfig(), small_config(), params)

    def test_history_length(self):
        result = self._train("B", epochs=3)
        self.assertEqual(len(result.history), 3)
        self.assertTrue(all(np.isfinite(result.history)))
        self.assertEqual(set(result.trained.names()), set(result.params.names(("b.",))))

    def test_branch_a_leaves_branch_b_untouched(self):
        from equipair.model import AssemblyModel

        initial = AssemblyModel(small_config()).init_params(7)
        result = self._train("A", params=initial)
        changed = [n for n in initial.names() if not np.array_equal(initial.tensors[n], result.params.tensors[n])]
        self.assertTrue(changed)
        self.assertTrue(all(n.startswith("a.") for n in changed))
        for name in initial.names(("b.",)):
            self.assertIs(result.params.tensors[name], initial.tensors[name])

    def test_deterministic(self):
        first = self._train("B")
        second = self._train("B")
        self.assertEqual(first.history, second.history)
        for name in first.params.names():
            assert_array_equal(first.params.tensors[name], second.params.tensors[name])

    def test_joint_updates_both_branches(self):
        result = self._train("joint", epochs=1)
        self.assertEqual(result.params.variant, "joint")
        self.assertEqual(set(result.trained.names()), set(result.params.names()))

    def test_divergence_reports_epoch(self):
        from equipair.core.errors import DivergenceError, NumericFault

        with mock.patch("equipair.train.trainer.sample_loss", side_effect=NumericFault("boom", op="mul")):
            with self.assertRaises(DivergenceError) as cm:
                self._train("B")
        self.assertEqual(cm.exception.epoch, 0)

    def test_rejects_bad_requests(self):
        from equipair.core.errors import ContractViolation
        from equipair.train import LossConfig, TrainConfig
        from equipair.train.trainer import train_branch

        with self.assertRaises(ContractViolation):
            train_branch("C", self.train_pairs, TrainConfig(epochs=1), LossConfig())
        with self.assertRaises(ContractViolation):
            train_branch("B", [], TrainConfig(epochs=1), LossConfig())


class TestEvaluate(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        from equipair.model import AssemblyModel

        cls.train_pairs, cls.test_pairs = small_pairs()
        cls.params = AssemblyModel(small_config()).init_params(0)

    def test_oracle_is_zero(self):
        from equipair.train.evaluate import evaluate_two_step

        ev = evaluate_two_step(None, None, self.test_pairs + self.train_pairs, seed=1, oracle=True)
        self.assertEqual(ev.overall.n, 4)
        self.assertLess(ev.overall.rmse_t, 1e-12)
        self.assertLess(ev.overall.rmse_r_deg, 1e-6)
        self.assertEqual(ev.overall.chamfer, 0.0)
        self.assertEqual(set(ev.tasks), {"lid", "peg"})

    def test_aggregates_match_samples(self):
        from equipair.train.evaluate import evaluate_two_step

        ev = evaluate_two_step(self.params.subset(("b.",)), self.params.subset(("a.",)), self.test_pairs, seed=0)
        n = len(ev.samples)
        self.assertAlmostEqual(ev.overall.rmse_t, np.sqrt(sum(s.sq_err_t for s in ev.samples) / (6 * n)))
        self.assertAlmostEqual(ev.overall.rmse_r_deg, np.sqrt(sum(s.sq_err_r_deg for s in ev.samples) / (6 * n)))
        self.assertAlmostEqual(ev.overall.chamfer, np.mean([s.chamfer for s in ev.samples]))
        self.assertEqual([s.pair_id for s in ev.samples], [p.pair_id for p in self.test_pairs])
        self.assertGreater(ev.overall.rmse_r_deg, 0.0)

    def test_deterministic_across_thread_counts(self):
        from equipair.train.evaluate import evaluate_two_step

        b, a = self.params.subset(("b.",)), self.params.subset(("a.",))
        one = evaluate_two_step(b, a, self.test_pairs, seed=3, threads=1)
        many = evaluate_two_step(b, a, self.test_pairs, seed=3, threads=4)
        self.assertEqual(one.to_dict(), many.to_dict())

    def test_joint(self):
        from equipair.model import AssemblyModel
        from equipair.train.evaluate import evaluate_joint

        params = AssemblyModel(small_config(), "joint").init_params(0)
        ev = evaluate_joint(params, self.test_pairs, seed=0)
        self.assertEqual(ev.config["variant"], "joint")
        self.assertEqual(ev.overall.n, len(self.test_pairs))

    def test_mismatched_configs(self):
        from equipair.core.errors import ContractViolation
        from equipair.model import AssemblyModel, EncoderConfig
        from equipair.train.evaluate import evaluate_two_step

        other = AssemblyModel(EncoderConfig(k_small=3, k_large=8, widths=(6, 8, 10), depth=2, head_width=8)).init_params(0)
        with self.assertRaises(ContractViolation):
            evaluate_two_step(self.params.subset(("b.",)), other.subset(("a.",)), self.test_pairs)


class TestReport(unittest.TestCase):

    def _report(self):
        from equipair.train import EvalReport, SampleRecord

        samples = [
            SampleRecord("lid_0000", "lid", 0.6, 60.0, 0.01),
            SampleRecord("lid_0002", "lid", 1.2, 6.0, 0.03),
            SampleRecord("peg_0001", "peg", 0.06, 600.0, 0.02),
        ]
        return EvalReport.from_samples(samples, {"seed": 0})

    def test_files(self):
        from equipair.train.report import read_metrics_csv, report

        ev = self._report()
        out = tmp / "equipair_test_report"
        paths = report(ev, str(out), history=[3.0, 2.0, 1.5])
        self.assertEqual(len(paths), 3)
        with open(out / "metrics.csv", newline="") as f:
            rows = list(csv.reader(f))
        self.assertEqual(rows[0], ["task", "rmse_t", "rmse_r_deg", "chamfer", "n"])
        self.assertEqual(len(rows) - 1, len(ev.tasks) + 1)
        self.assertEqual(rows[-1][0], "ALL")

        doc = json.loads((out / "metrics.json").read_text())
        table = read_metrics_csv(str(out / "metrics.csv"))
        self.assertEqual(table["ALL"]["rmse_t"], doc["overall"]["rmse_t"])
        for task, m in doc["tasks"].items():
            self.assertEqual(table[task]["rmse_r_deg"], m["rmse_r_deg"])
            self.assertEqual(table[task]["n"], m["n"])
        self.assertEqual(len(doc["samples"]), 3)
        self.assertIn("euler_convention", doc)

        history = (out / "loss-history.csv").read_text().splitlines()
        self.assertEqual(history, ["epoch,loss", "0,3.0", "1,2.0", "2,1.5"])

    def test_all_row_is_sample_weighted(self):
        ev = self._report()
        total_n = sum(m.n for m in ev.tasks.values())
        self.assertEqual(ev.overall.n, total_n)
        sq_t = sum(m.rmse_t**2 * 6 * m.n for m in ev.tasks.values())
        sq_r = sum(m.rmse_r_deg**2 * 6 * m.n for m in ev.tasks.values())
        self.assertAlmostEqual(ev.overall.rmse_t, np.sqrt(sq_t / (6 * total_n)))
        self.assertAlmostEqual(ev.overall.rmse_r_deg, np.sqrt(sq_r / (6 * total_n)))
        chamfer = sum(m.chamfer * m.n for m in ev.tasks.values()) / total_n
        self.assertAlmostEqual(ev.overall.chamfer, chamfer)
        self.assertAlmostEqual(ev.tasks["lid"].rmse_t, np.sqrt(1.8 / 12))

    def test_empty_report(self):
        from equipair.core.errors import ContractViolation
        from equipair.train import EvalReport

        with self.assertRaises(ContractViolation):
            EvalReport.from_samples([])


if __name__ == "__main__":
    unittest.main()
