"""The corpus: named models with their expected classification flags.

Entries are emitted as model files under ``data/v1``; the directory can
be overridden with the ``TOPOFAM_CORPUS_DIR`` environment variable.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from ..fibered import OverContext
from ..fincat import FunctorMap, identity_functor
from ..grothendieck import PosetPseudofunctor, total_category
from ..modelfile import ModelFile, parse_model, print_model
from . import counterexamples as cx
from .builders import build_finfilt, build_finset, build_fintop

CORPUS_VERSION = "v1"
PACKAGE_DATA = Path(__file__).parent / "data" / CORPUS_VERSION


def corpus_dir() -> Path:
    env = os.environ.get("TOPOFAM_CORPUS_DIR")
    return Path(env) if env else PACKAGE_DATA


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    build: Callable[[], ModelFile]
    expected: dict[str, bool]
    note: str

    @property
    def filename(self) -> str:
        return f"{self.name}.model"


def _flags(faithful, prefibration, fibration, pretopological, topological, e_functor, m_functor) -> dict[str, bool]:
    return {"faithful": faithful, "prefibration": prefibration, "fibration": fibration,
            "pretopological": pretopological, "topological": topological,
            "E_functor": e_functor, "M_functor": m_functor}


def _functor_model(u: FunctorMap, flags: dict[str, bool]) -> ModelFile:
    m = ModelFile()
    m.add_functor(u)
    m.expectations[u.name] = dict(flags)
    return m


def _pseudofunctor_model(p: PosetPseudofunctor, flags: dict[str, bool]) -> ModelFile:
    m = ModelFile()
    m.add_pseudofunctor(p)
    m.expectations[p.name] = dict(flags)
    return m


def _golden(filename: str) -> ModelFile:
    return parse_model((PACKAGE_DATA / filename).read_text(encoding="utf-8"))


def prefib_not_fib_model() -> ModelFile:
    found = cx.search_prefibration_not_fibration()
    if found is None:
        raise LookupError("no prefibration-not-fibration model within the search bound")
    return _functor_model(found[0], PREFIB_NOT_FIB)


def pretop_not_top_model() -> ModelFile:
    found = cx.search_pretopological_not_topological()
    if found is None:
        raise LookupError("no pretopological-not-topological model within the search bound")
    return _pseudofunctor_model(found[0], PRETOP_NOT_TOP)


TOPOLOGICAL = _flags(True, True, True, True, True, True, True)
PREFIB_NOT_FIB = _flags(True, True, False, True, False, False, True)
PRETOP_NOT_TOP = _flags(True, True, True, True, False, False, False)
ANTICHAIN = _flags(True, True, True, False, False, False, False)
COLLAPSE = _flags(False, False, False, False, False, False, False)
MISSING_LIFT = _flags(True, False, False, False, False, False, True)
V_FIBER = _flags(True, True, True, False, False, False, True)
LAMBDA = _flags(True, True, True, False, False, False, False)
ANTICHAIN_FIBER = _flags(True, True, True, False, False, False, False)


def _entries() -> list[CorpusEntry]:
    return [
        CorpusEntry("fintop2", lambda: _functor_model(build_fintop(2).u, TOPOLOGICAL), TOPOLOGICAL,
                    "finite spaces over finite sets of size at most 2"),
        CorpusEntry("finfilt2", lambda: _functor_model(build_finfilt(2).u, TOPOLOGICAL), TOPOLOGICAL,
                    "sets with a filter of subsets, improper filter allowed"),
        CorpusEntry("finset2_identity", lambda: _functor_model(identity_functor(build_finset(2)), TOPOLOGICAL),
                    TOPOLOGICAL, "identity functor; every flag holds"),
        CorpusEntry("antichain", lambda: _functor_model(cx.antichain_over_point(), ANTICHAIN), ANTICHAIN,
                    "fibration whose fibre has no binary product"),
        CorpusEntry("prefib_not_fib", lambda: _golden("prefib_not_fib.model"), PREFIB_NOT_FIB,
                    "first hit of the poset search over r < s < t; also pretopological"),
        CorpusEntry("pretop_not_top", lambda: _golden("pretop_not_top.model"), PRETOP_NOT_TOP,
                    "first hit of the pseudofunctor search over s < t; the transition misses the top"),
        CorpusEntry("collapse_parallel_pair", lambda: _functor_model(cx.collapse_parallel_pair(), COLLAPSE), COLLAPSE,
                    "non-faithful: two parallel arrows over one"),
        CorpusEntry("missing_lift", lambda: _functor_model(cx.missing_lift(), MISSING_LIFT), MISSING_LIFT,
                    "nothing over the bottom of the interval"),
        CorpusEntry("v_fiber_no_top", lambda: _functor_model(cx.v_fiber_no_top(), V_FIBER), V_FIBER,
                    "fibre without a top over a base without a terminal object"),
        CorpusEntry("lambda_fiber", lambda: _functor_model(cx.lambda_fiber(), LAMBDA), LAMBDA,
                    "fibre with a top but no bottom"),
        CorpusEntry("lattice_chains", lambda: _pseudofunctor_model(cx.lattice_pseudofunctor(), TOPOLOGICAL),
                    TOPOLOGICAL, "lattice fibres, identity transition"),
        CorpusEntry("antichain_fiber", lambda: _pseudofunctor_model(cx.antichain_fiber_pseudofunctor(), ANTICHAIN_FIBER),
                    ANTICHAIN_FIBER, "one fibre is an antichain"),
    ]


def corpus_entries() -> list[CorpusEntry]:
    return _entries()


def build_counterexamples() -> list[CorpusEntry]:
    keep = {"antichain", "prefib_not_fib", "pretop_not_top", "collapse_parallel_pair",
            "missing_lift", "v_fiber_no_top", "lambda_fiber", "antichain_fiber"}
    return [e for e in _entries() if e.name in keep]


def subject_context(model: ModelFile, name: str) -> OverContext:
    """The functor an expectation talks about: a functor section, or the
    total projection of a pseudofunctor section."""
    if name in model.functors:
        return OverContext(model.functors[name])
    if name in model.pseudofunctors:
        return total_category(model.pseudofunctors[name]).context()
    raise KeyError(name)


def write_corpus(directory: Path | str) -> list[Path]:
    """Write every entry's canonical model file; golden searched entries are
    regenerated from their searches."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    fresh = {"prefib_not_fib": prefib_not_fib_model, "pretop_not_top": pretop_not_top_model}
    for e in _entries():
        model = fresh[e.name]() if e.name in fresh else e.build()
        path = out / e.filename
        path.write_text(print_model(model), encoding="utf-8")
        written.append(path)
    return written
