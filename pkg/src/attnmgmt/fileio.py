"""JSON serialization for policies, outcomes and reports.

Every document is written with ``json.dumps(..., indent=2, sort_keys=True)``.
Python prints floats with the shortest repr that round-trips, so parsing a
document and writing the parsed values again reproduces it byte for byte.
Non-finite numbers never appear: infinities are written as ``null``, and
``NaN``/``Infinity`` literals are rejected on input.
"""
from __future__ import annotations

import json
import math
from typing import Any, Optional

import numpy as np

from .errors import PolicyFileError
from .ic import ICReport
from .optimal3 import OptimalOutcome
from .oracle import OracleReport
from .policy import InformationPolicy, validate_policy
from .quadratic import QuadraticModel
from .search import Prop2Report
from .simplex import az_from_belief, is_three_state


def _reject_constant(name: str):
    raise PolicyFileError(f"non-finite number {name} is not allowed")


def loads(text: str) -> Any:
    """Strict JSON parse: NaN and infinities are errors."""
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise PolicyFileError(f"malformed JSON: {exc}") from exc


def dumps(obj: Any) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True, allow_nan=False)


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if hasattr(obj, "value") and isinstance(obj.value, str):  # enums
        return obj.value
    return obj


# -- policies ---------------------------------------------------------------

def _number_list(doc: dict, key: str, depth: int) -> list:
    if key not in doc:
        raise PolicyFileError(f"policy file is missing {key!r}")
    value = doc[key]

    def check(v, d):
        if d == 0:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise PolicyFileError(f"{key!r} must contain numbers, got {v!r}")
            return float(v)
        if not isinstance(v, list) or not v:
            raise PolicyFileError(f"{key!r} must be a non-empty {'nested ' * (d - 1)}list")
        return [check(x, d - 1) for x in v]

    return check(value, depth)


def parse_policy(text: str) -> dict:
    """Parse a policy document into ``states``, ``prior``, ``support``, ``weights``.

    Probabilities and weights must be finite and nonnegative; shapes must
    agree. Semantic checks (Bayes plausibility, positive weights, distinct
    beliefs) are left to :func:`load_policy`.
    """
    doc = loads(text)
    if not isinstance(doc, dict):
        raise PolicyFileError("policy file must hold a JSON object")
    states = _number_list(doc, "states", 1)
    prior = _number_list(doc, "prior", 1)
    support = _number_list(doc, "support", 2)
    weights = _number_list(doc, "weights", 1)
    for name, values in (("prior", prior), ("weights", weights), ("support", [x for row in support for x in row])):
        if any(v < 0.0 for v in values):
            raise PolicyFileError(f"{name!r} has a negative entry")
    if len(prior) != len(states):
        raise PolicyFileError(f"prior has {len(prior)} entries for {len(states)} states")
    if any(len(row) != len(states) for row in support):
        raise PolicyFileError("every support belief needs one probability per state")
    if len(weights) != len(support):
        raise PolicyFileError(f"{len(support)} beliefs but {len(weights)} weights")
    return {"states": states, "prior": prior, "support": support, "weights": weights}


def load_policy(text: str, kappa: float) -> tuple[InformationPolicy, QuadraticModel]:
    """Parse and validate a policy document against the model it describes."""
    doc = parse_policy(text)
    model = QuadraticModel(doc["states"], doc["prior"], kappa)
    return validate_policy(doc["support"], doc["weights"], model), model


def policy_to_dict(p: InformationPolicy, model: QuadraticModel, with_az: bool = False) -> dict:
    out = {
        "states": model.states,
        "prior": model.prior,
        "support": p.support,
        "weights": p.weights,
    }
    if with_az and model.general is None and is_three_state(model.states):
        out["az"] = [list(az_from_belief(b)) for b in p.support]
    return out


# -- results ----------------------------------------------------------------

def outcome_to_dict(out: OptimalOutcome) -> dict:
    model = QuadraticModel((-1.0, 0.0, 1.0), out.prior, out.kappa)
    return {
        "regime": out.regime,
        "payoff": out.payoff,
        "kappa": out.kappa,
        "prior": out.prior,
        "s_star": out.s_star,
        "slope_used": out.slope_used,
        "degenerate": out.degenerate,
        "reflected": out.reflected,
        "signal": dict(out.signal),
        "thresholds": None if out.thresholds is None else list(out.thresholds.as_tuple()),
        "policy": policy_to_dict(out.policy, model, with_az=True),
    }


def ic_report_to_dict(r: ICReport) -> dict:
    return {
        "ic": r.ic,
        "min_margin": r.min_margin,
        "margins": [
            {"i": pm.i, "j": pm.j, "choice": pm.choice, "psych": pm.psych, "margin": pm.margin} for pm in r.margins
        ],
        "violations": [
            {"i": v.i, "j": v.j, "choice": v.choice, "psych": v.psych, "reason": v.reason} for v in r.violations
        ],
        "slope_form": None if r.slope_form is None else [{"slope": s, "s_star": c} for s, c in r.slope_form],
    }


def oracle_report_to_dict(r: OracleReport, model: QuadraticModel) -> dict:
    return {
        "verdict": r.verdict,
        "best_value": r.best_value,
        "full_attention_value": r.full_attention_value,
        "gap": r.gap,
        "refined_gap": r.refined_gap,
        "grid_resolution": r.grid_resolution,
        "tol": r.tol,
        "best_garbling": policy_to_dict(r.best_garbling, model),
    }


def search_report_to_dict(r: Prop2Report) -> dict:
    return {
        "ok": r.ok,
        "prior": r.prior,
        "kappa": r.kappa,
        "regime": r.closed_form.regime,
        "closed_form_payoff": r.closed_form.payoff,
        "grid_max": r.grid_max,
        "gap": r.gap,
        "argmax": list(r.argmax),
        "closed_form_params": [list(p) for p in r.closed_form_params],
        "argmax_near_closed_form": r.argmax_near_closed_form,
        "negative_slope_best": r.negative_slope_best,
        "affine_residual": r.affine_residual,
        "n_candidates": r.n_candidates,
        "n_feasible": r.n_feasible,
        "ic_failures": r.ic_failures,
        "plausibility_failures": r.plausibility_failures,
        "tol": r.tol,
        "messages": list(r.messages),
    }


def parse_report(text: str) -> dict:
    """Parse any document written by :func:`dumps` (outcome or report)."""
    doc = loads(text)
    if not isinstance(doc, dict):
        raise PolicyFileError("report must be a JSON object")
    return doc


def read_text(path: Optional[str]) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise PolicyFileError(f"cannot read {path}: {exc.strerror}") from exc
