"""Job specs, job execution and report rendering for the command line.

Spec and report documents are JSON. Complex numbers are ``{"re": x, "im": y}``
objects, matrices are lists of rows, and every float in a report is written
with 17 significant digits so reports diff cleanly and re-parse exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .errors import GateForgeError, SpecValidationError
from .families import (
    ExtendedGeneralParams,
    ExtendedRestrictedParams,
    SimpleNotParams,
    build_extended_general,
    build_extended_restricted,
    build_simple_not,
    fit_extended_general,
)
from .protocols import (
    Protocol,
    TimedHamiltonian,
    commutation_audit,
    evolve_time_ordered,
    evolve_unordered,
    normalize_protocol,
    protocol_integral,
)
from .qmatrix import as_qmatrix, is_unitary, max_norm, pauli_compose, pauli_labels, phase_distance
from .synthesis import (
    BranchChoice,
    HamiltonianResult,
    SynthesisOptions,
    TimeBase,
    canonical_to_restricted,
    synthesize_canonical_extended,
    synthesize_extended,
    synthesize_from_unitary,
    synthesize_simple,
    verify_gate,
)

__all__ = ["JobSpec", "render_report", "run_job", "validate_spec"]

COMMANDS = ("synth", "evolve", "fit", "audit", "verify")
FAMILIES = ("simple", "extended_general", "extended_restricted", "canonical")
FAMILY_PARAMS = {
    "simple": ("alpha", "beta"),
    "extended_restricted": ("alpha", "beta", "rho", "delta"),
    "extended_general": ("chi", "beta", "alpha", "rho", "eta", "delta", "Omega", "Upsilon"),
    "canonical": ("ising", "N", "gamma"),
}
TOP_KEYS = (
    "command", "family", "params", "branch", "timebase", "options",
    "protocol", "target", "terms", "steps", "tolerance", "output_path",
)
OPTION_KEYS = ("drop_identity", "require_no_linear", "minimize_splitting", "up_to_phase")
PROTOCOL_KEYS = ("shape", "start", "duration", "scale", "a", "b", "omega", "phase", "samples")
DEFAULT_STEPS = 10_000
DEFAULT_TOLERANCE = {"evolve": 1e-8}
VERIFY_TOLERANCE = 1e-9

EXIT_OK, EXIT_INPUT, EXIT_FAILED = 0, 1, 2


@dataclass(frozen=True)
class JobSpec:
    command: str
    family: str
    params: dict[str, float] = field(default_factory=dict)
    branch: BranchChoice = BranchChoice()
    timebase: TimeBase = TimeBase()
    options: SynthesisOptions = SynthesisOptions()
    up_to_phase: bool = False
    protocol: dict[str, Any] | None = None
    target: list | None = None
    terms: list[dict[str, float]] | None = None
    steps: int = DEFAULT_STEPS
    tolerance: float = VERIFY_TOLERANCE
    output_path: str | None = None

    def to_document(self) -> dict[str, Any]:
        options = asdict(self.options)
        options["up_to_phase"] = self.up_to_phase
        doc = {
            "command": self.command,
            "family": self.family,
            "params": dict(self.params),
            "branch": self.branch.as_dict(),
            "timebase": {"delta_t": self.timebase.delta_t, "hbar": self.timebase.hbar},
            "options": options,
            "protocol": None if self.protocol is None else dict(self.protocol),
            "target": self.target,
            "terms": self.terms,
            "steps": self.steps,
            "tolerance": self.tolerance,
            "output_path": self.output_path,
        }
        return doc


# -- validation ---------------------------------------------------------------


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool) or (isinstance(x, float) and x.is_integer())


def _parse_complex(x, path, errors):
    if _is_number(x):
        return complex(x)
    if isinstance(x, dict) and set(x) == {"re", "im"} and _is_number(x["re"]) and _is_number(x["im"]):
        return complex(x["re"], x["im"])
    errors.append((path, "expected a number or {re, im} object"))
    return 0j


def _parse_matrix(doc, path, errors):
    if not isinstance(doc, list) or not doc or not all(isinstance(r, list) for r in doc):
        errors.append((path, "expected a list of rows"))
        return None
    n = len(doc)
    if n not in (2, 4) or any(len(r) != n for r in doc):
        errors.append((path, "expected a 2x2 or 4x4 matrix"))
        return None
    return [[_parse_complex(x, f"{path}[{i}][{j}]", errors) for j, x in enumerate(r)] for i, r in enumerate(doc)]


def _check_keys(obj, allowed, path, errors):
    if not isinstance(obj, dict):
        errors.append((path, "expected an object"))
        return False
    for key in obj:
        if key not in allowed:
            errors.append((f"{path}.{key}" if path else key, "unknown key"))
    return True


def _validate_protocol(doc, delta_t, errors):
    if not _check_keys(doc, PROTOCOL_KEYS, "protocol", errors):
        return None
    out = {"shape": doc.get("shape"), "start": doc.get("start", 0.0),
           "duration": doc.get("duration", delta_t), "scale": doc.get("scale", 1.0)}
    shape = out["shape"]
    if shape not in ("rectangular", "raised_cosine", "const_plus_cosine", "sampled"):
        errors.append(("protocol.shape", f"unknown protocol shape {shape!r}"))
        return None
    for key in ("start", "duration", "scale"):
        if not _is_number(out[key]):
            errors.append((f"protocol.{key}", "expected a finite number"))
    if _is_number(out["duration"]) and out["duration"] <= 0:
        errors.append(("protocol.duration", "must be positive"))
    if shape == "const_plus_cosine":
        for key in ("a", "b", "omega", "phase"):
            out[key] = doc.get(key, 0.0)
            if not _is_number(out[key]):
                errors.append((f"protocol.{key}", "expected a finite number"))
    else:
        for key in ("a", "b", "omega", "phase"):
            if key in doc:
                errors.append((f"protocol.{key}", f"not used by shape {shape!r}"))
    if shape == "sampled":
        samples = doc.get("samples")
        if not isinstance(samples, list) or not all(
            isinstance(s, list) and len(s) == 2 and all(_is_number(v) for v in s) for s in samples
        ):
            errors.append(("protocol.samples", "expected a list of [time, value] pairs"))
        else:
            out["samples"] = [[float(t), float(v)] for t, v in samples]
    elif "samples" in doc:
        errors.append(("protocol.samples", f"not used by shape {shape!r}"))
    return out


def validate_spec(document) -> JobSpec:
    """Check a spec document (JSON text or parsed object) and fill in defaults.

    Raises ``SpecValidationError`` listing every problem as ``(path, message)``.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SpecValidationError([(f"line {exc.lineno}, column {exc.colno}", exc.msg)]) from None
    errors: list[tuple[str, str]] = []
    if not _check_keys(document, TOP_KEYS, "", errors):
        raise SpecValidationError(errors)

    command = document.get("command")
    if command not in COMMANDS:
        errors.append(("command", f"expected one of {COMMANDS}, got {command!r}"))
    family = document.get("family")
    if family not in FAMILIES:
        errors.append(("family", f"expected one of {FAMILIES}, got {family!r}"))

    raw_target = document.get("target")
    target = None if raw_target is None else _parse_matrix(raw_target, "target", errors)

    params: dict[str, float] = {}
    raw_params = document.get("params", {})
    if _check_keys(raw_params, FAMILY_PARAMS.get(family, ()), "params", errors) and family in FAMILIES:
        needs_params = not (command == "fit" and target is not None)
        for name in FAMILY_PARAMS[family]:
            if name not in raw_params:
                if needs_params:
                    errors.append((f"params.{name}", "missing"))
                continue
            value = raw_params[name]
            if name == "N":
                if not (_is_number(value) and _is_int(value)):
                    errors.append(("params.N", "expected an integer"))
                    continue
                value = int(value)
            elif not _is_number(value):
                errors.append((f"params.{name}", "expected a finite number"))
                continue
            params[name] = value
        if family == "extended_general":
            for name in ("Omega", "Upsilon"):
                if name in params and not 0 <= params[name] <= math.pi / 2:
                    errors.append((f"params.{name}", "must lie in [0, pi/2]"))

    branch = BranchChoice()
    raw_branch = document.get("branch", {})
    if _check_keys(raw_branch, ("N1", "N2", "N3", "N4"), "branch", errors):
        values = {}
        for key, value in raw_branch.items():
            if key in ("N1", "N2", "N3", "N4"):
                if _is_number(value) and _is_int(value):
                    values[key] = int(value)
                else:
                    errors.append((f"branch.{key}", "expected an integer"))
        branch = BranchChoice(**values)

    timebase = TimeBase()
    raw_tb = document.get("timebase", {})
    if _check_keys(raw_tb, ("delta_t", "hbar"), "timebase", errors):
        values = {}
        for key in ("delta_t", "hbar"):
            if key in raw_tb:
                value = raw_tb[key]
                if not _is_number(value) or value <= 0:
                    errors.append((f"timebase.{key}", "must be a positive number"))
                else:
                    values[key] = value
        timebase = TimeBase(**values)

    options = SynthesisOptions()
    up_to_phase = None
    raw_opts = document.get("options", {})
    if _check_keys(raw_opts, OPTION_KEYS, "options", errors):
        flags = {}
        for key in OPTION_KEYS:
            value = raw_opts.get(key)
            if value is None:
                continue
            if not isinstance(value, bool):
                errors.append((f"options.{key}", "expected true or false"))
            elif key == "up_to_phase":
                up_to_phase = value
            else:
                flags[key] = value
        options = SynthesisOptions(**flags)
        if options.require_no_linear and family in ("simple",):
            errors.append(("options.require_no_linear", "only meaningful for two-spin families"))
    if up_to_phase is None:
        up_to_phase = options.drop_identity or family == "canonical"

    protocol = None
    if document.get("protocol") is not None:
        protocol = _validate_protocol(document["protocol"], timebase.delta_t, errors)
    elif command == "evolve":
        protocol = {"shape": "rectangular", "start": 0.0, "duration": timebase.delta_t, "scale": 1.0}

    terms = document.get("terms")
    if terms is not None:
        if not isinstance(terms, list) or not terms:
            errors.append(("terms", "expected a non-empty list of {label: coefficient} objects"))
            terms = None
        else:
            parsed = []
            for k, term in enumerate(terms):
                if not isinstance(term, dict) or not term:
                    errors.append((f"terms[{k}]", "expected a non-empty object"))
                    continue
                for label, c in term.items():
                    if label not in pauli_labels(2) + pauli_labels(4):
                        errors.append((f"terms[{k}].{label}", "not a Pauli label"))
                    elif not _is_number(c):
                        errors.append((f"terms[{k}].{label}", "expected a real coefficient"))
                parsed.append(dict(term))
            if len({len(l) for t in parsed for l in t}) > 1:
                errors.append(("terms", "labels mix one- and two-spin operators"))
            terms = parsed

    steps = document.get("steps", DEFAULT_STEPS)
    if not (_is_number(steps) and _is_int(steps) and steps >= 1):
        errors.append(("steps", "expected an integer >= 1"))
        steps = DEFAULT_STEPS
    tolerance = document.get("tolerance", DEFAULT_TOLERANCE.get(command, VERIFY_TOLERANCE))
    if not _is_number(tolerance) or tolerance <= 0:
        errors.append(("tolerance", "expected a positive number"))
        tolerance = VERIFY_TOLERANCE
    output_path = document.get("output_path")
    if output_path is not None and not isinstance(output_path, str):
        errors.append(("output_path", "expected a string"))

    if command == "fit" and family not in ("extended_general", "extended_restricted", None):
        errors.append(("family", "fit supports extended_general and extended_restricted"))

    if errors:
        raise SpecValidationError(errors)
    return JobSpec(
        command=command,
        family=family,
        params=params,
        branch=branch,
        timebase=timebase,
        options=options,
        up_to_phase=up_to_phase,
        protocol=protocol,
        target=None if raw_target is None else raw_target,
        terms=terms,
        steps=int(steps),
        tolerance=tolerance,
        output_path=output_path,
    )


# -- execution ----------------------------------------------------------------


def _cplx(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _matrix(m):
    return [[_cplx(z) for z in row] for row in np.asarray(m)]


def _target_matrix(spec):
    if spec.target is None:
        return None
    # already validated, so no errors can be collected here
    return as_qmatrix(_parse_matrix(spec.target, "target", []))


def _family_target(spec):
    p, f = spec.params, spec.family
    if f == "simple":
        return build_simple_not(SimpleNotParams(**p))
    if f == "extended_restricted":
        return build_extended_restricted(ExtendedRestrictedParams(**p))
    if f == "extended_general":
        return build_extended_general(ExtendedGeneralParams(**p))
    params, _ = canonical_to_restricted(p["ising"], p["N"], p["gamma"], spec.timebase)
    return build_extended_restricted(params)


def _synthesize(spec) -> HamiltonianResult:
    p, f, b, t, o = spec.params, spec.family, spec.branch, spec.timebase, spec.options
    if f == "simple":
        return synthesize_simple(SimpleNotParams(**p), b, t, o)
    if f == "extended_restricted":
        return synthesize_extended(ExtendedRestrictedParams(**p), b, t, o)
    if f == "extended_general":
        return synthesize_from_unitary(_family_target(spec), b, t, o)
    return synthesize_canonical_extended(p["ising"], p["N"], p["gamma"], t)


def _hamiltonian_section(r: HamiltonianResult):
    return {
        "matrix": _matrix(r.H),
        "pauli_terms": {k: float(v) for k, v in r.decomposition.terms.items()},
        "spectrum": {"levels": list(r.spectrum.levels), "splitting": r.spectrum.splitting},
        "dropped_identity_coefficient": r.dropped_identity_coefficient,
        "expected_global_phase": r.expected_global_phase,
    }


def _verification_section(v):
    return {
        "up_to_phase": v.up_to_phase,
        "tolerance": v.tolerance,
        "exact_distance": v.exact_distance,
        "phase_distance": v.phase_distance,
        "realized_phase": v.realized_phase,
        "not_behavior": v.not_behavior,
        "passed": v.passed,
        "evolution": _matrix(v.evolution),
    }


def _run_synth(spec, target_override=None):
    r = _synthesize(spec)
    target = target_override if target_override is not None else _family_target(spec)
    v = verify_gate(r, target, spec.timebase, up_to_phase=spec.up_to_phase, tol=spec.tolerance)
    result = {
        "hamiltonian": _hamiltonian_section(r),
        "target": _matrix(target),
        "verification": _verification_section(v),
    }
    return (EXIT_OK if v.passed else EXIT_FAILED), result


def _build_protocol(doc):
    kwargs = {k: v for k, v in doc.items() if k != "samples"}
    if doc["shape"] == "sampled":
        times, values = zip(*doc["samples"]) if doc.get("samples") else ((), ())
        kwargs.update(times=times, values=values)
    return Protocol(**kwargs)


def _run_evolve(spec):
    r = _synthesize(spec)
    raw = _build_protocol(spec.protocol)
    protocol = normalize_protocol(raw)
    th = TimedHamiltonian.single(r.H, protocol)
    ordered = evolve_time_ordered(th, spec.timebase, spec.steps)
    unordered = evolve_unordered(th, spec.timebase)
    target = _family_target(spec)
    ordering_gap = max_norm(ordered - unordered)
    distance = phase_distance(ordered, target) if spec.up_to_phase else max_norm(ordered - target)
    passed = distance <= spec.tolerance
    result = {
        "hamiltonian": _hamiltonian_section(r),
        "protocol": {
            "raw_integral": protocol_integral(raw),
            "normalized_scale": protocol.scale,
            "normalized_integral": protocol_integral(protocol),
        },
        "steps": spec.steps,
        "ordered": _matrix(ordered),
        "unordered": _matrix(unordered),
        "ordered_vs_unordered": ordering_gap,
        "ordered_vs_target": distance,
        "up_to_phase": spec.up_to_phase,
        "tolerance": spec.tolerance,
        "passed": passed,
    }
    return (EXIT_OK if passed else EXIT_FAILED), result


def _run_fit(spec):
    u = _target_matrix(spec)
    if u is None:
        u = _family_target(spec)
    p = fit_extended_general(u)
    residual = max_norm(build_extended_general(p) - u)
    return EXIT_OK, {
        "unitary": is_unitary(u),
        "params": p.as_dict(),
        "residual": residual,
    }


def _run_audit(spec):
    if spec.terms is not None:
        hs = [pauli_compose(t) for t in spec.terms]
        labels = [dict(t) for t in spec.terms]
    else:
        r = _synthesize(spec)
        items = [(k, v) for k, v in r.decomposition.terms.items() if set(k) != {"I"}]
        hs = [pauli_compose({k: v}) for k, v in items]
        labels = [{k: float(v)} for k, v in items]
    if not hs:
        return EXIT_OK, {"terms": [], "pairs": [], "ordering_free": True}
    rect = Protocol.rectangular(0.0, spec.timebase.delta_t)
    audit = commutation_audit(TimedHamiltonian(tuple((h, rect) for h in hs)))
    return EXIT_OK, {
        "terms": labels,
        "pairs": [
            {
                "i": a.i,
                "j": a.j,
                "commutator_norm": a.commutator_norm,
                "anticommutator_norm": a.anticommutator_norm,
                "commutes": a.commutes,
                "anticommutes": a.anticommutes,
            }
            for a in audit.pairs
        ],
        "ordering_free": audit.ordering_free,
    }


def run_job(spec: JobSpec) -> tuple[int, dict[str, Any]]:
    """Execute a validated job. Returns ``(exit_code, report)``.

    Exit codes: 0 pass, 2 verification failure, 1 input or module error.
    """
    report: dict[str, Any] = {
        "meta": {"tool": "gateforge", "version": __version__, "report_format": 1},
        "spec": spec.to_document(),
    }
    try:
        if spec.command == "synth":
            code, result = _run_synth(spec)
        elif spec.command == "verify":
            code, result = _run_synth(spec, _target_matrix(spec))
        elif spec.command == "evolve":
            code, result = _run_evolve(spec)
        elif spec.command == "fit":
            code, result = _run_fit(spec)
        else:
            code, result = _run_audit(spec)
    except GateForgeError as exc:
        report["status"] = "error"
        report["error"] = error_payload(exc)
        return EXIT_INPUT, report
    report["status"] = {EXIT_OK: "pass", EXIT_FAILED: "fail"}[code]
    report["result"] = result
    return code, report


def error_payload(exc: Exception) -> dict[str, Any]:
    payload = {
        "code": getattr(exc, "code", "E_INPUT"),
        "type": type(exc).__name__,
        "message": str(exc),
    }
    if isinstance(exc, SpecValidationError):
        payload["fields"] = [{"path": p, "message": m} for p, m in exc.errors]
    return payload


# -- rendering ------------------------------------------------------------------


def _render(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"cannot serialize non-finite number {x!r}")
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_render(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(x, dict) and set(x) == {"re", "im"} for x in obj) or all(
            not isinstance(x, (dict, list, tuple)) for x in obj
        ):
            return "[" + ", ".join(_render_inline(x) for x in obj) + "]"
        items = [pad + _render(x, indent, level + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _render_inline(obj):
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_render(v, 0, 0)}" for k, v in obj.items()) + "}"
    return _render(obj, 0, 0)


def render_report(report: dict[str, Any]) -> str:
    """Deterministic JSON text with 17-significant-digit floats."""
    return _render(report, 2, 0) + "\n"
