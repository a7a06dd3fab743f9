import json
import shutil
from pathlib import Path
import tempfile
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from scipy.spatial.distance import pdist

tmp = Path(tempfile.gettempdir())

CUBE_OFF = """OFF
# unit cube
8 6 12
0 0 0
1 0 0
1 1 0
0 1 0
0 0 1
1 0 1
1 1 1
0 1 1
4 0 3 2 1
4 4 5 6 7
4 0 1 5 4
4 1 2 6 5
4 2 3 7 6
4 3 0 4 7
"""


def fresh_dir(name):
    path = tmp / name
    shutil.rmtree(path, ignore_errors=True)
    path.mkdir(parents=True)
    return path


def write_cube(path):
    path.write_text(CUBE_OFF)
    return str(path)


class TestXyz(unittest.TestCase):

    def test_round_trip_with_padding(self):
        from equipair.data.io import load_xyz, save_xyz
        from equipair.data.sampling import pad_cloud

        rng = np.random.default_rng(0)
        cloud = pad_cloud(rng.normal(size=(50, 3)) / 3.0, 64)
        path = str(tmp / "equipair_test_cloud.xyz")
        save_xyz(path, cloud)
        loaded = load_xyz(path, 64)
        self.assertEqual(loaded.valid_count, 50)
        assert_array_equal(loaded.points, cloud.points)

    def test_malformed_line_is_reported(self):
        from equipair.core.errors import LoadError
        from equipair.data.io import load_xyz

        path = tmp / "equipair_test_bad.xyz"
        path.write_text("2\n0 0 0\n1 x 0\n")
        with self.assertRaises(LoadError) as cm:
            load_xyz(str(path))
        self.assertEqual(cm.exception.line, 3)
        path.write_text("3\n0 0 0\n")
        with self.assertRaises(LoadError):
            load_xyz(str(path))
        path.write_text("3\n0 0 0\n1 1 1\n2 2 2\n")
        with self.assertRaises(LoadError):
            load_xyz(str(path), num_points=2)


class TestSymmetry(unittest.TestCase):

    def test_parse(self):
        from equipair.data.io import parse_symmetry

        sym = parse_symmetry({"rotational_axes": ["z"], "mirror_axes": ["x"]})
        self.assertEqual(sym.continuous_axis, "z")
        self.assertEqual(len(sym.finite), 2)
        square = parse_symmetry({"finite_rotational": {"axis": "z", "order": 4}})
        self.assertIsNone(square.continuous_axis)
        self.assertEqual(len(square.finite), 4)
        self.assertTrue(square.is_closed())
        both = parse_symmetry({"finite_rotational": [{"axis": "z", "order": 2}, {"axis": "x", "order": 2}]})
        self.assertEqual(len(both.finite), 4)

    def test_file_round_trip(self):
        from equipair.data.io import load_symmetry, parse_symmetry, save_symmetry

        sym = parse_symmetry({"rotational_axes": ["y"], "mirror_axes": ["x"]})
        path = str(tmp / "equipair_test_sym.json")
        save_symmetry(path, sym)
        self.assertTrue(load_symmetry(path).same_as(sym))

    def test_errors_carry_lines(self):
        from equipair.core.errors import LoadError
        from equipair.data.io import load_symmetry

        path = tmp / "equipair_test_bad_sym.json"
        cases = {
            '{\n  "rotational_axes": ["z"],\n  "spin": 3\n}\n': 3,
            '{\n  "rotational_axes": ["z", "x"]\n}\n': 2,
            '{\n  "elements": [[[1, 0, 0], [0, 1, 0], [0, 0, -1]]]\n}\n': 2,
            '{\n  "rotational_axes": ["q"]\n}\n': 2,
        }
        for text, line in cases.items():
            path.write_text(text)
            with self.assertRaises(LoadError) as cm:
                load_symmetry(str(path))
            self.assertEqual(cm.exception.line, line, text)


class TestMesh(unittest.TestCase):

    def test_load_off_cube(self):
        from equipair.data.io import load_off

        mesh = load_off(write_cube(tmp / "equipair_test_cube.off"))
        self.assertEqual(mesh.vertices.shape, (8, 3))
        self.assertEqual(mesh.triangles.shape, (12, 3))
        self.assertAlmostEqual(mesh.total_area, 6.0)

    def test_load_off_diagnostics(self):
        from equipair.core.errors import LoadError
        from equipair.data.io import load_off

        path = tmp / "equipair_test_bad.off"
        path.write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n")
        with self.assertRaises(LoadError) as cm:
            load_off(str(path))
        self.assertEqual(cm.exception.line, 6)
        path.write_text("OFF\n3 1 0\n0 0 0\n1 zero 0\n0 1 0\n3 0 1 2\n")
        with self.assertRaises(LoadError) as cm:
            load_off(str(path))
        self.assertEqual(cm.exception.line, 4)
        path.write_text("PLY\n")
        with self.assertRaises(LoadError):
            load_off(str(path))

    def test_primitives_areas(self):
        from equipair.data.shapes import cylinder_side, disk

        self.assertAlmostEqual(disk(1.0, 0.0, 256).total_area, np.pi, places=3)
        self.assertAlmostEqual(cylinder_side(1.0, 0.0, 2.0, 256).total_area, 4 * np.pi, places=3)


class TestSampling(unittest.TestCase):

    def test_poisson_disk_on_cube(self):
        from equipair.data.io import load_off
        from equipair.data.sampling import poisson_disk_sample

        mesh = load_off(write_cube(tmp / "equipair_test_cube.off"))
        cloud, radius = poisson_disk_sample(mesh, 1024, seed=0, return_radius=True)
        self.assertEqual(cloud.points.shape, (1024, 3))
        self.assertGreaterEqual(pdist(cloud.points).min(), radius)
        # every point on the cube surface
        on_face = np.any(np.isclose(cloud.points, 0.0) | np.isclose(cloud.points, 1.0), axis=1)
        self.assertTrue(np.all(on_face))
        again = poisson_disk_sample(mesh, 1024, seed=0)
        assert_array_equal(again.points, cloud.points)

    def test_zero_area(self):
        from equipair.core.errors import ContractViolation
        from equipair.data import TriMesh
        from equipair.data.sampling import poisson_disk_sample

        flat = TriMesh(np.zeros((3, 3)), [[0, 1, 2]])
        with self.assertRaises(ContractViolation):
            poisson_disk_sample(flat, 10)

    def test_pad_cloud(self):
        from equipair.core.errors import ContractViolation
        from equipair.data.sampling import pad_cloud

        pts = np.arange(9, dtype=float).reshape(3, 3)
        cloud = pad_cloud(pts, 7)
        self.assertEqual(cloud.valid_count, 3)
        assert_array_equal(cloud.points[3:], pts[[0, 1, 2, 0]])
        with self.assertRaises(ContractViolation):
            pad_cloud(pts, 2)


class TestCanonical(unittest.TestCase):

    def test_canonicalize_rests_on_plane(self):
        from equipair.data.canonical import base_center, canonicalize
        from equipair.geometry import PointCloud

        rng = np.random.default_rng(1)
        cloud = PointCloud(rng.uniform(-1, 1, size=(200, 3)) + [3.0, -2.0, 5.0])
        out, transform = canonicalize(cloud, "xy")
        lo, bc = base_center(out.valid, "xy")
        self.assertEqual(lo, 0.0)
        assert_allclose(bc[:2], 0.0, atol=1e-12)
        assert_array_equal(transform.rotation, np.eye(3))
        out_xz, _ = canonicalize(cloud, "xz")
        self.assertAlmostEqual(out_xz.valid[:, 1].min(), 0.0)

    def test_augment_inverse(self):
        from equipair.data.canonical import augment
        from equipair.data.synthetic import make_pair
        from equipair.geometry import apply

        pair = make_pair("lid", "lid_x", np.random.default_rng(2), num_points=96)
        aug = augment(pair, 5)
        assert_allclose(apply(aug.gt_a, aug.obs_a).points, pair.cloud_a.points, atol=1e-9)
        assert_allclose(apply(aug.gt_b, aug.obs_b).points, pair.cloud_b.points, atol=1e-9)
        assert_allclose(aug.obs_b.valid.mean(axis=0), 0.0, atol=1e-12)
        again = augment(pair, 5)
        assert_array_equal(again.obs_a.points, aug.obs_a.points)

    def test_augment_rotations_uniform(self):
        from equipair.data import AssemblyPair
        from equipair.data.canonical import augment
        from equipair.geometry import PointCloud

        cloud = PointCloud(np.eye(3))
        pair = AssemblyPair("lid_x", "lid", cloud, cloud)
        trace_a, trace_b = [], []
        for i in range(100_000):
            aug = augment(pair, [21, i])
            trace_a.append(np.trace(aug.gt_a.rotation))
            trace_b.append(np.trace(aug.gt_b.rotation))
        self.assertLessEqual(abs(np.mean(trace_a)), 0.02)
        self.assertLessEqual(abs(np.mean(trace_b)), 0.02)


class TestDataset(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        from equipair.data.io import save_dataset
        from equipair.data.synthetic import gen_synthetic

        cls.root = fresh_dir("equipair_test_dataset")
        cls.manifest, cls.pairs = gen_synthetic("all", 5, seed=3, num_points=96)
        save_dataset(str(cls.root), cls.manifest, cls.pairs)

    def test_split_rule(self):
        from equipair.data.synthetic import split_sizes

        self.assertEqual(split_sizes(10), (6, 4))
        self.assertEqual(split_sizes(50), (30, 20))
        self.assertEqual(split_sizes(2), (1, 1))
        self.assertEqual((len(self.manifest.train), len(self.manifest.test)), (3, 2))

    def test_mixed_tasks(self):
        self.assertEqual([p.task for p in self.pairs], ["lid", "peg", "lid", "peg", "lid"])
        self.assertEqual(self.manifest.task_of("peg_0001"), "peg")

    def test_generated_set_validates(self):
        from equipair.data.validate import validate_dataset

        self.assertEqual(validate_dataset(str(self.root)), [])

    def test_load_round_trip(self):
        from equipair.data.io import load_dataset

        ds = load_dataset(str(self.root))
        self.assertEqual(ds.manifest.to_dict(), self.manifest.to_dict())
        for pair in self.pairs:
            loaded = ds.pair(pair.pair_id)
            self.assertEqual(loaded.task, pair.task)
            assert_array_equal(loaded.cloud_a.points, pair.cloud_a.points)
            assert_array_equal(loaded.cloud_b.points, pair.cloud_b.points)
            self.assertEqual(loaded.cloud_b.valid_count, pair.cloud_b.valid_count)
            self.assertTrue(loaded.sym_a.same_as(pair.sym_a))

    def test_generation_is_deterministic(self):
        from equipair.data.synthetic import gen_synthetic

        _, again = gen_synthetic("all", 5, seed=3, num_points=96)
        for a, b in zip(again, self.pairs):
            assert_array_equal(a.cloud_a.points, b.cloud_a.points)

    def test_peg_symmetries(self):
        peg = next(p for p in self.pairs if p.task == "peg")
        self.assertEqual(len(peg.sym_b.finite), 2)
        self.assertTrue(peg.sym_a.continuous_axis == "z" or len(peg.sym_a.finite) == 4)

    def test_invalid_requests(self):
        from equipair.core.errors import ContractViolation
        from equipair.data.synthetic import gen_synthetic

        with self.assertRaises(ContractViolation):
            gen_synthetic("lid", 1)
        with self.assertRaises(ContractViolation):
            gen_synthetic("gear", 4)


class TestValidateMutations(unittest.TestCase):

    def setUp(self):
        from equipair.data.io import save_dataset
        from equipair.data.synthetic import gen_synthetic

        self.root = fresh_dir("equipair_test_mutated")
        self.manifest, pairs = gen_synthetic("lid", 2, seed=4, num_points=64)
        save_dataset(str(self.root), self.manifest, pairs)

    def test_broken_rest_names_pair(self):
        from equipair.data.validate import validate_dataset

        pid = self.manifest.train[0]
        path = self.root / pid / "B.xyz"
        lines = path.read_text().splitlines()
        x, y, _ = lines[1].split()
        lines[1] = f"{x} {y} -0.5"
        path.write_text("\n".join(lines) + "\n")
        problems = validate_dataset(str(self.root))
        self.assertTrue(problems)
        self.assertTrue(any(pid in p for p in problems))

    def test_overlapping_splits(self):
        from equipair.data.validate import validate_dataset

        path = self.root / "manifest.json"
        doc = json.loads(path.read_text())
        doc["test"].append(doc["train"][0])
        path.write_text(json.dumps(doc))
        problems = validate_dataset(str(self.root))
        self.assertTrue(any("share" in p for p in problems))

    def test_missing_pair(self):
        from equipair.data.validate import validate_dataset

        shutil.rmtree(self.root / self.manifest.test[0])
        problems = validate_dataset(str(self.root))
        self.assertTrue(any(self.manifest.test[0] in p for p in problems))

    def test_unlisted_pair_directory(self):
        from equipair.data.validate import validate_dataset

        shutil.copytree(self.root / self.manifest.train[0], self.root / "lid_9999")
        problems = validate_dataset(str(self.root))
        self.assertEqual(len(problems), 1)
        self.assertIn("lid_9999", problems[0])


if __name__ == "__main__":
    unittest.main()
