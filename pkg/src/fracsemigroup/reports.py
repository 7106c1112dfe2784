"""Convergence records and order fitting shared by operators and experiments."""
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

__all__ = ["ConvergenceRecord", "ConvergenceReport", "fit_order"]


@dataclass
class ConvergenceRecord:
    eps: float
    error_norm: float
    norm_value: float = float("nan")
    extra: dict = field(default_factory=dict)


@dataclass
class ConvergenceReport:
    experiment: str
    params: dict
    records: list = field(default_factory=list)
    slope: float = float("nan")
    slope_ci: tuple = (float("nan"), float("nan"))
    verdict: bool = False
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def table(self):
        lines = [f"# {self.experiment}"]
        lines += [f"#   {k} = {v}" for k, v in self.params.items()]
        lines.append(f"{'eps':>12} {'error':>14} {'norm':>14}")
        for r in self.records:
            lines.append(f"{r.eps:12.6g} {r.error_norm:14.6e} {r.norm_value:14.6e}")
        lines.append(f"slope = {self.slope:.4f}  (95% CI {self.slope_ci[0]:.4f} .. {self.slope_ci[1]:.4f})")
        for k, v in self.checks.items():
            lines.append(f"check {k}: {'PASS' if v else 'FAIL'}")
        lines += [f"note: {n}" for n in self.notes]
        lines.append(f"verdict: {'PASS' if self.verdict else 'FAIL'}")
        return "\n".join(lines)

    def to_json(self):
        def clean(o):
            if isinstance(o, dict):
                return {str(k): clean(v) for k, v in o.items()}
            if isinstance(o, (list, tuple)):
                return [clean(v) for v in o]
            if isinstance(o, (np.floating, np.integer, np.bool_)):
                return o.item()
            if isinstance(o, float) and not math.isfinite(o):
                return str(o)
            return o
        return json.dumps(clean(asdict(self)), indent=2, sort_keys=True)


def fit_order(eps, err):
    """Least-squares slope of ``log err`` against ``log eps`` with a 95% interval."""
    x = np.log(np.asarray(eps, dtype=float))
    y = np.log(np.asarray(err, dtype=float))
    if x.size < 3:
        fit = np.polyfit(x, y, 1)
        return float(fit[0]), (float("nan"), float("nan"))
    res = stats.linregress(x, y)
    half = stats.t.ppf(0.975, x.size - 2) * res.stderr
    return float(res.slope), (float(res.slope - half), float(res.slope + half))


def running_slopes(report):
    """Slope between each record and its predecessor (NaN for the first)."""
    out = [float("nan")]
    recs = report.records
    for a, b in zip(recs, recs[1:]):
        if a.error_norm > 0 and b.error_norm > 0:
            out.append(math.log(b.error_norm / a.error_norm) / math.log(b.eps / a.eps))
        else:
            out.append(float("nan"))
    return out


def report_csv(report):
    lines = ["eps,error_norm,norm_value,slope_running"]
    for r, s in zip(report.records, running_slopes(report)):
        lines.append(f"{r.eps!r},{r.error_norm!r},{r.norm_value!r},{s!r}")
    return "\n".join(lines) + "\n"
