"""Central finite-difference gradient checks.

A coordinate is skipped rather than compared when the function is not
smooth inside [x-2h, x+2h]: a ReLU or max selection switching there makes
the central difference meaningless. Smoothness is judged by comparing the
difference quotients at steps h and 2h, which agree to O(h^2) for smooth
functions and differ by the slope jump otherwise.
"""

from dataclasses import dataclass, field
from logging import getLogger

import numpy as np

from .variable import backward, zero_grad

logger = getLogger(__name__)


@dataclass
class GradMismatch:
    name: str
    index: tuple
    analytic: float
    numeric: float
    rel_error: float


@dataclass
class GradCheckReport:
    checked: int = 0
    skipped: int = 0
    max_rel_error: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def __str__(self):
        lines = [
            f"checked={self.checked} skipped={self.skipped} max_rel_error={self.max_rel_error:.3g}"
        ]
        for f in self.failures[:10]:
            lines.append(
                f"  {f.name}{list(f.index)}: analytic={f.analytic:.10g} numeric={f.numeric:.10g} rel={f.rel_error:.3g}"
            )
        return "\n".join(lines)


def relative_error(a, b, floor=1e-4):
    return abs(a - b) / max(abs(a), abs(b), floor)


def check_gradients(
    fn,
    variables,
    coords=None,
    h=1e-5,
    rtol=1e-4,
    floor=1e-4,
    kink_rtol=2e-5,
    kink_atol=1e-8,
):
    """Compare ``backward`` against central differences.

    fn: zero-argument callable building a scalar Variable from the current
        values of ``variables``.
    variables: mapping name -> leaf Variable; values are perturbed in place
        and restored.
    coords: iterable of (name, index) pairs to check; every coordinate when
        omitted.
    """
    variables = dict(variables)
    zero_grad(variables)
    root = fn()
    backward(root)
    f0 = root.item()
    analytic = {
        name: (np.zeros(v.shape) if v.grad is None else v.grad.copy())
        for name, v in variables.items()
    }
    if coords is None:
        coords = [
            (name, idx)
            for name, v in variables.items()
            for idx in np.ndindex(*v.shape)
        ]

    report = GradCheckReport()
    for name, idx in coords:
        v = variables[name]
        idx = tuple(int(i) for i in np.atleast_1d(idx)) if v.ndim else ()
        orig = v.value[idx]
        f = {}
        for step in (-2, -1, 1, 2):
            v.value[idx] = orig + step * h
            f[step] = fn().item()
        v.value[idx] = orig

        c1 = (f[1] - f[-1]) / (2 * h)
        c2 = (f[2] - f[-2]) / (4 * h)
        d1 = (f[1] - 2 * f0 + f[-1]) / h
        d2 = (f[2] - 2 * f0 + f[-2]) / (2 * h)
        a = float(analytic[name][idx])
        scale = max(abs(c1), abs(a), floor)
        tol = kink_rtol * scale + kink_atol
        if abs(c2 - c1) > tol or abs(d2 - 2 * d1) > tol:
            report.skipped += 1
            logger.debug(f"skip {name}{list(idx)}: not smooth within 2h")
            continue

        report.checked += 1
        err = relative_error(a, c1, floor)
        report.max_rel_error = max(report.max_rel_error, err)
        if err > rtol:
            report.failures.append(GradMismatch(name, idx, a, c1, err))
    return report
