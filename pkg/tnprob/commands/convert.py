"""`tnprob convert`: rewrite a model file into another family."""

import argparse
from pathlib import Path

import numpy as np

from tnprob.commands.common import RunRecorder, manifest_path, parse_pairs
from tnprob.errors import PreconditionError
from tnprob.models import BornMachine, DecoheredBM, Lps, Model, Ugm
from tnprob.services.storage_service import load_model, save_model
from tnprob.transforms import (
    FULLY_DECOHERED_REQUIRED,
    EdgeToNodeAssignment,
    PhaseAssignment,
    dbm_to_lps,
    fdbm_to_ugm,
    lps_to_dbm,
    ugm_to_fdbm,
)
from tnprob.utils import log_to_console

TARGETS = ("ugm", "fdbm", "lps", "dbm")


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("convert", help="convert a model file between families")
    parser.add_argument("--from", dest="source", type=Path, required=True, help="input model file")
    parser.add_argument("--to", dest="target", choices=TARGETS, required=True)
    parser.add_argument("--phase-seed", type=int, default=None, help="random phases for ugm -> fdbm (default zero)")
    parser.add_argument(
        "--assignment", default=None, help="dbm -> lps edge-to-node map, e.g. b1_2=n2,b2_3=n3 (default smaller node)"
    )
    parser.add_argument("--out", type=Path, required=True)
    parser.set_defaults(handler=run)


def _as_dbm(model: Model) -> DecoheredBM:
    if isinstance(model, DecoheredBM):
        return model
    if isinstance(model, BornMachine):
        return DecoheredBM(model)
    raise PreconditionError(f"expected a bm or dbm model, got {model.family.value}")


def convert(
    model: Model, target: str, phase_seed: int | None = None, assignment: dict[str, str] | None = None
) -> Model:
    """Apply the conversion named by `target`; illegal pairs raise PreconditionError."""
    if target == "ugm":
        if isinstance(model, Ugm):
            return model
        if isinstance(model, Lps):
            raise PreconditionError(f"lps -> ugm is not a conversion; {FULLY_DECOHERED_REQUIRED}")
        return fdbm_to_ugm(_as_dbm(model))
    if target == "fdbm":
        if not isinstance(model, Ugm):
            dbm = _as_dbm(model)
            if not dbm.fully_decohered:
                raise PreconditionError(FULLY_DECOHERED_REQUIRED)
            return dbm
        phases = None
        if phase_seed is not None:
            phases = PhaseAssignment.random(model, np.random.default_rng(phase_seed))
        return ugm_to_fdbm(model, phases)
    if target == "dbm":
        if isinstance(model, Lps):
            return lps_to_dbm(model)
        if isinstance(model, Ugm):
            return ugm_to_fdbm(model)
        return _as_dbm(model)
    if isinstance(model, Lps):
        return model
    if isinstance(model, Ugm):
        raise PreconditionError("ugm -> lps needs a dbm; convert to fdbm first")
    return dbm_to_lps(_as_dbm(model), EdgeToNodeAssignment(assignment or {}))


def run(args: argparse.Namespace) -> int:
    recorder = RunRecorder("convert", args, seeds={"phase_seed": args.phase_seed})
    model = load_model(args.source)
    converted = convert(model, args.target, args.phase_seed, parse_pairs(args.assignment, "assignment"))
    recorder.add(save_model(converted, args.out))
    recorder.write(manifest_path(args.out))
    g = converted.net.graph
    log_to_console(
        f"✓ {model.family.value} -> {converted.family.value}: {len(g.nodes)} nodes, "
        f"{len(g.visible_edges)} visible and {len(g.hidden_edges)} hidden edges -> {args.out}"
    )
    return 0
