"""Reading and writing model, network, dataset, distribution and manifest files."""

import csv
import json
from pathlib import Path
from typing import TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from tnprob.data.bars_and_stripes import SequenceDataset
from tnprob.errors import SchemaError
from tnprob.learn.params import HmmMixtureParams
from tnprob.models import BornMachine, DecoheredBM, Distribution, Lps, Model, ModelFamily, Ugm
from tnprob.network import TensorNetwork, network_from_document, network_to_document
from tnprob.schemas import MixtureDocument, ModelDocument, NetworkDocument, RunManifest

DocumentT = TypeVar("DocumentT", bound=BaseModel)

DATASET_HEADER_KEYS = ("rows", "cols", "segment_len", "seed", "dedup", "d_obs")


def write_document(doc: BaseModel, path: str | Path) -> Path:
    """Write a pydantic document as indented JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(doc.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def read_document(path: str | Path, schema: type[DocumentT]) -> DocumentT:
    """Parse and validate a JSON document, mapping every failure to SchemaError."""
    path = Path(path)
    try:
        return schema.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise SchemaError(f"{path} is not a valid {schema.__name__}: {e}") from e
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path} is not JSON: {e}") from e


# =============================================================================
# Networks and models
# =============================================================================


def save_network(net: TensorNetwork, path: str | Path) -> Path:
    return write_document(network_to_document(net), path)


def load_network(path: str | Path) -> TensorNetwork:
    return network_from_document(read_document(path, NetworkDocument))


def model_to_document(model: Model) -> ModelDocument:
    if isinstance(model, Ugm):
        return ModelDocument(family="ugm", network=network_to_document(model.net), nonnegative=True)
    if isinstance(model, BornMachine):
        return ModelDocument(family="bm", network=network_to_document(model.net))
    if isinstance(model, DecoheredBM):
        return ModelDocument(
            family="dbm", network=network_to_document(model.net), decohered=sorted(model.decohered)
        )
    if isinstance(model, Lps):
        return ModelDocument(
            family="lps", network=network_to_document(model.net), purification=sorted(model.purification)
        )
    raise TypeError(f"not a model: {type(model).__name__}")


def model_from_document(doc: ModelDocument) -> Model:
    net = network_from_document(doc.network)
    family = ModelFamily(doc.family)
    if family is ModelFamily.UGM:
        return Ugm(net)
    if family is ModelFamily.BM:
        return BornMachine(net)
    if family is ModelFamily.DBM:
        return DecoheredBM(BornMachine(net), frozenset(doc.decohered))
    return Lps(net, frozenset(doc.purification))


def save_model(model: Model, path: str | Path) -> Path:
    return write_document(model_to_document(model), path)


def load_model(path: str | Path) -> Model:
    return model_from_document(read_document(path, ModelDocument))


def save_mixture(
    params: HmmMixtureParams, path: str | Path, epoch: int | None = None, test_nll: float | None = None
) -> Path:
    return write_document(params.to_document(epoch, test_nll), path)


def load_mixture(path: str | Path) -> HmmMixtureParams:
    return HmmMixtureParams.from_document(read_document(path, MixtureDocument))


def write_manifest(manifest: RunManifest, path: str | Path) -> Path:
    return write_document(manifest, path)


# =============================================================================
# CSV files
# =============================================================================


def write_distribution_csv(dist: Distribution, path: str | Path) -> Path:
    """One row per outcome tuple: one-based outcome columns, then probability."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow([*dist.names, "probability"])
        for outcome, probability in dist.rows():
            writer.writerow([*(x + 1 for x in outcome), repr(probability)])
    return path


def read_distribution_csv(path: str | Path) -> list[tuple[tuple[int, ...], float]]:
    """Rows of a distribution CSV, outcomes one-based as written."""
    with Path(path).open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        next(reader)
        return [(tuple(int(x) for x in row[:-1]), float(row[-1])) for row in reader]


def write_dataset_csv(ds: SequenceDataset, path: str | Path) -> Path:
    """A `# key=value,...` provenance line, a column header, then one sequence per row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    provenance = {
        "rows": ds.rows,
        "cols": ds.cols,
        "segment_len": ds.segment_len,
        "seed": ds.seed,
        "dedup": str(ds.dedup).lower(),
        "d_obs": ds.d_obs,
    }
    with path.open("w", newline="", encoding="utf-8") as f:
        f.write("# " + ",".join(f"{k}={v}" for k, v in provenance.items()) + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow([f"o{t + 1}" for t in range(ds.t_len)])
        writer.writerows(ds.sequences.tolist())
    return path


def read_dataset_csv(path: str | Path) -> SequenceDataset:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as f:
        first = f.readline().strip()
        if not first.startswith("#"):
            raise SchemaError(f"{path}: missing '# rows=...,cols=...' provenance line")
        try:
            provenance = dict(item.split("=", 1) for item in first[1:].strip().split(","))
            missing = [k for k in DATASET_HEADER_KEYS if k not in provenance]
            if missing:
                raise SchemaError(f"{path}: provenance line lacks {missing}")
            reader = csv.reader(f)
            next(reader)
            rows = [[int(x) for x in row] for row in reader if row]
            return SequenceDataset(
                np.asarray(rows, dtype=np.int64).reshape(len(rows), -1),
                d_obs=int(provenance["d_obs"]),
                rows=int(provenance["rows"]),
                cols=int(provenance["cols"]),
                segment_len=int(provenance["segment_len"]),
                dedup=provenance["dedup"] == "true",
                seed=int(provenance["seed"]),
            )
        except (ValueError, StopIteration) as e:
            if isinstance(e, SchemaError):
                raise
            raise SchemaError(f"{path}: malformed dataset file: {e}") from e
