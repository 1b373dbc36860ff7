"""
Iso-Edge Enumeration
Flip-graph traversal of primitive iso-edge domains up to GL_n(Z), facet
descent to the full cell census, and the mass formula.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from census_store import CensusStore
from equivalence import canonical_form
from errors import CensusError
from exact_arith import IntVector, sym_dim, sym_to_matrix
from isoedge import (
    DEFAULT_PERTURBATION, IsoEdgeConfiguration, flip, principal_configuration,
)
from lattice_cvp import GeneralizedConfiguration, form_vector_system
from polyhedra import Cone, face_of, interior_point, irredundant_facets

logger = logging.getLogger(__name__)

DEFAULT_BATCH = 50
MIN_DIMENSION = 2
MAX_DIMENSION = 5


@dataclass(frozen=True)
class CellRecord:
    """
    One GL_n(Z)-orbit of iso-edge cells.

    ``stabilizer`` is None for cells without positive definite forms (their
    stabilizer is infinite); ``configuration`` is set for top cells.
    """
    dimension: int
    key: str
    stabilizer: Optional[int]
    cone: Cone
    system: GeneralizedConfiguration
    contains_pd: bool
    configuration: Optional[IsoEdgeConfiguration] = None

    @property
    def rank(self) -> int:
        return self.system.rank

    @property
    def mass_term(self) -> Fraction:
        if not self.contains_pd:
            return Fraction(0)
        return Fraction((-1) ** self.dimension, self.stabilizer)

    def interior_form(self):
        return sym_to_matrix(interior_point(self.cone))

    def to_dict(self) -> dict:
        data = {
            "key": self.key,
            "dimension": self.dimension,
            "stabilizer": self.stabilizer,
            "contains_pd": self.contains_pd,
            "cone": {
                "ambient_dim": self.cone.ambient_dim,
                "rays": [list(r) for r in self.cone.rays],
                "lineality": [list(l) for l in self.cone.lineality],
                "inequalities": [list(a) for a in self.cone.inequalities],
                "equalities": [list(e) for e in self.cone.equalities],
            },
            "system": {
                "n": self.system.n,
                "rank": self.system.rank,
                "classes": [[mask, [list(v) for v in vecs]] for mask, vecs in self.system.classes],
            },
        }
        if self.configuration is not None:
            data["configuration"] = [list(r) for r in self.configuration.reps]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "CellRecord":
        def vectors(rows) -> Tuple[IntVector, ...]:
            return tuple(tuple(int(x) for x in row) for row in rows)

        c = data["cone"]
        cone = Cone(ambient_dim=int(c["ambient_dim"]), inequalities=vectors(c["inequalities"]),
                    equalities=vectors(c["equalities"]), rays=vectors(c["rays"]),
                    lineality=vectors(c["lineality"]))
        s = data["system"]
        system = GeneralizedConfiguration(
            n=int(s["n"]), rank=int(s["rank"]),
            classes=tuple((int(mask), vectors(vecs)) for mask, vecs in s["classes"]))
        configuration = None
        if "configuration" in data:
            configuration = IsoEdgeConfiguration(n=system.n, reps=vectors(data["configuration"]))
            # the stored cone is the domain cone, inequalities in triple order
            configuration.__dict__["domain_cone"] = cone
        stabilizer = data.get("stabilizer")
        return cls(dimension=int(data["dimension"]), key=data["key"],
                   stabilizer=None if stabilizer is None else int(stabilizer), cone=cone,
                   system=system, contains_pd=bool(data["contains_pd"]), configuration=configuration)


@dataclass
class EnumerationResult:
    """Cell orbits sorted by canonical key, plus the flip adjacency log."""
    n: int
    records: List[CellRecord]
    adjacency: List[Tuple[str, int, str]] = field(default_factory=list)
    min_dim: int = 0

    def by_dimension(self, dim: int) -> List[CellRecord]:
        return [r for r in self.records if r.dimension == dim]

    @property
    def top(self) -> List[CellRecord]:
        return self.by_dimension(sym_dim(self.n))

    def counts(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for record in self.records:
            counts[record.dimension] = counts.get(record.dimension, 0) + 1
        return dict(sorted(counts.items(), reverse=True))

    @property
    def complete_dims(self) -> List[int]:
        top = sym_dim(self.n)
        low = self.min_dim if self.min_dim else top
        return list(range(top, low - 1, -1))

    def to_payload(self) -> dict:
        return {
            "dimension": self.n,
            "min_dim": self.min_dim if self.min_dim else sym_dim(self.n),
            "complete_dims": self.complete_dims,
            "summary": {
                "domains": len(self.top),
                "counts": {str(d): c for d, c in self.counts().items()},
            },
            "cells": [r.to_dict() for r in self.records],
            "adjacency": [[p, f, c] for p, f, c in self.adjacency],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "EnumerationResult":
        records = [CellRecord.from_dict(cell) for cell in payload.get("cells", [])]
        adjacency = [(p, int(f), c) for p, f, c in payload.get("adjacency", [])]
        return cls(n=int(payload["dimension"]), records=records, adjacency=adjacency,
                   min_dim=int(payload.get("min_dim", 0)))


def _domain_system(config: IsoEdgeConfiguration) -> GeneralizedConfiguration:
    classes = tuple((mask, tuple(sorted((r, tuple(-x for x in r)))))
                    for mask, r in enumerate(config.reps, start=1))
    return GeneralizedConfiguration(n=config.n, rank=config.n, classes=classes)


def domain_record(config: IsoEdgeConfiguration) -> CellRecord:
    """Top-dimensional record of a primitive configuration."""
    form = canonical_form(config)
    return CellRecord(dimension=sym_dim(config.n), key=form.key, stabilizer=len(form.bases),
                      cone=config.domain_cone, system=_domain_system(config), contains_pd=True,
                      configuration=config)


def _expand_domain(config: IsoEdgeConfiguration) -> List[Tuple[int, CellRecord]]:
    """Flip every facet; worker entry point."""
    out = []
    for idx, facet in enumerate(config.facets):
        out.append((idx, domain_record(flip(config, facet))))
    return out


def face_record(cone: Cone) -> CellRecord:
    """Record of a cell given its cone, via the generalized configuration at its interior point."""
    system = form_vector_system(sym_to_matrix(interior_point(cone)))
    contains_pd = system.rank == system.n
    form = canonical_form(system)
    return CellRecord(dimension=cone.dimension, key=form.key,
                      stabilizer=len(form.bases) if contains_pd else None,
                      cone=cone, system=system, contains_pd=contains_pd)


def _expand_cell(cone: Cone) -> List[Tuple[int, CellRecord]]:
    """Every facet of a cell as a record; worker entry point."""
    out = []
    for idx, facet in enumerate(irredundant_facets(cone)):
        out.append((idx, face_record(face_of(cone, facet.indices).as_cone)))
    return out


class IsoEdgeEnumerator:
    """
    Stateful driver for the domain and cell enumerations.

    Work proceeds in waves: every orbit of one wave is expanded before the
    next wave starts, in batches of ``checkpoint_every`` sorted keys, and
    discoveries are committed in (parent key, facet index) order. The result
    therefore does not depend on the worker count or the batch size.
    """

    def __init__(self, n: int, workers: int = 1, checkpoint_path: Optional[str] = None,
                 checkpoint_every: int = DEFAULT_BATCH, perturbation: Fraction = DEFAULT_PERTURBATION):
        """
        Args:
            n (int): Dimension, 2..5
            workers (int): Worker processes (1 = in-process)
            checkpoint_path (str): Checkpoint file or None
            checkpoint_every (int): Orbits per batch between checkpoints
            perturbation (Fraction): Selling perturbation of the seed form
        """
        if not MIN_DIMENSION <= n <= MAX_DIMENSION:
            raise ValueError(f"dimension {n} outside the supported range "
                             f"{MIN_DIMENSION}..{MAX_DIMENSION}")
        if workers < 1 or checkpoint_every < 1:
            raise ValueError("workers and checkpoint_every must be positive")
        self.n = n
        self.top = sym_dim(n)
        self.workers = workers
        self.checkpoint_every = checkpoint_every
        self.perturbation = perturbation
        self.store = CensusStore(checkpoint_path)
        self.reset()

    def reset(self) -> None:
        """Forget all traversal state."""
        self.records: Dict[str, CellRecord] = {}
        self.adjacency: List[Tuple[str, int, str]] = []
        self.phase = "primitive"
        self.level = self.top
        self.frontier: List[str] = []
        self.next_frontier: List[str] = []
        self.batches = 0

    # ------------------------------------------------------------------
    # state
    # ------------------------------------------------------------------

    def _state(self) -> dict:
        return {
            "dimension": self.n,
            "phase": self.phase,
            "level": self.level,
            "records": [self.records[k].to_dict() for k in sorted(self.records)],
            "frontier": list(self.frontier),
            "next_frontier": list(self.next_frontier),
            "adjacency": [[p, f, c] for p, f, c in self.adjacency],
        }

    def _restore(self) -> bool:
        state = self.store.load_checkpoint()
        if state is None:
            return False
        if int(state["dimension"]) != self.n:
            raise CensusError(f"checkpoint is for n={state['dimension']}, not n={self.n}")
        self.phase = state["phase"]
        self.level = int(state["level"])
        self.records = {}
        for cell in state["records"]:
            record = CellRecord.from_dict(cell)
            self.records[record.key] = record
        self.frontier = list(state["frontier"])
        self.next_frontier = list(state["next_frontier"])
        self.adjacency = [(p, int(f), c) for p, f, c in state["adjacency"]]
        return True

    def _checkpoint(self) -> None:
        self.store.save_checkpoint(self._state())

    def _map(self, fn, items, executor):
        if executor is None:
            return [fn(item) for item in items]
        return list(executor.map(fn, items))

    def _commit(self, record: CellRecord, parent: str) -> None:
        existing = self.records.get(record.key)
        if existing is None:
            self.records[record.key] = record
            self.next_frontier.append(record.key)
            return
        if existing.dimension != record.dimension or existing.contains_pd != record.contains_pd:
            raise CensusError(f"orbit {record.key[:12]} reached from {parent[:12]} with dimension "
                              f"{record.dimension}/pd={record.contains_pd}, recorded as "
                              f"{existing.dimension}/pd={existing.contains_pd}")
        if existing.stabilizer != record.stabilizer:
            raise CensusError(f"orbit {record.key[:12]} has stabilizer {record.stabilizer} from "
                              f"{parent[:12]}, recorded as {existing.stabilizer}")

    # ------------------------------------------------------------------
    # traversal
    # ------------------------------------------------------------------

    def _run_waves(self, expand, payload_of, executor) -> None:
        while self.frontier:
            batch = self.frontier[:self.checkpoint_every]
            results = self._map(expand, [payload_of(self.records[k]) for k in batch], executor)
            for parent, expansions in zip(batch, results):
                for idx, record in expansions:
                    if self.phase == "primitive":
                        self.adjacency.append((parent, idx, record.key))
                    self._commit(record, parent)
            self.frontier = self.frontier[len(batch):]
            if not self.frontier:
                self._advance()
            self.batches += 1
            logger.info("n=%d %s level %d: batch %d done, %d orbits known, %d queued",
                        self.n, self.phase, self.level, self.batches, len(self.records),
                        len(self.frontier) + len(self.next_frontier))
            self._checkpoint()

    def _advance(self) -> None:
        if self.phase == "cells":
            self.level -= 1
        self.frontier = sorted(set(self.next_frontier))
        self.next_frontier = []

    def _executor(self):
        return ProcessPoolExecutor(max_workers=self.workers) if self.workers > 1 else None

    def run_primitive(self) -> EnumerationResult:
        """
        Enumerate all primitive domains by flipping facets from the principal domain.

        Returns:
            EnumerationResult: top-dimensional records and the adjacency log
        """
        if not self.records and not self._restore():
            seed = domain_record(principal_configuration(self.n, self.perturbation))
            self.records[seed.key] = seed
            self.frontier = [seed.key]
            logger.info("n=%d seeded with the principal domain %s", self.n, seed.key[:12])
        if self.phase == "primitive":
            executor = self._executor()
            try:
                self._run_waves(_expand_domain, lambda r: r.configuration, executor)
            finally:
                if executor is not None:
                    executor.shutdown()
        return self.result(self.top)

    def run_cells(self, min_dim: int = 1) -> EnumerationResult:
        """
        Descend from the domains through facets until ``min_dim``.

        Args:
            min_dim (int): Lowest cell dimension to compute (>= 1)
        """
        if not 1 <= min_dim <= self.top:
            raise ValueError(f"min_dim must lie in 1..{self.top}")
        self.run_primitive()
        if self.phase == "primitive":
            self.phase = "cells"
            self.level = self.top
            self.frontier = sorted(k for k, r in self.records.items() if r.dimension == self.top)
            self.next_frontier = []
        executor = self._executor()
        try:
            while self.frontier and self.level > min_dim:
                self._run_waves_at_level(executor)
        finally:
            if executor is not None:
                executor.shutdown()
        return self.result(min_dim)

    def _run_waves_at_level(self, executor) -> None:
        level = self.level
        while self.frontier and self.level == level:
            batch = self.frontier[:self.checkpoint_every]
            results = self._map(_expand_cell, [self.records[k].cone for k in batch], executor)
            for parent, expansions in zip(batch, results):
                for _, record in expansions:
                    self._commit(record, parent)
            self.frontier = self.frontier[len(batch):]
            if not self.frontier:
                self._advance()
            self.batches += 1
            logger.info("n=%d cells level %d: batch %d, %d orbits known",
                        self.n, level, self.batches, len(self.records))
            self._checkpoint()

    def result(self, min_dim: int) -> EnumerationResult:
        records = sorted((r for r in self.records.values() if r.dimension >= min_dim),
                         key=lambda r: r.key)
        return EnumerationResult(n=self.n, records=records, adjacency=list(self.adjacency),
                                 min_dim=min_dim)

    def get_statistics(self) -> dict:
        counts: Dict[int, int] = {}
        for record in self.records.values():
            counts[record.dimension] = counts.get(record.dimension, 0) + 1
        return {
            "dimension": self.n,
            "phase": self.phase,
            "level": self.level,
            "orbits": len(self.records),
            "counts": dict(sorted(counts.items(), reverse=True)),
            "adjacency_entries": len(self.adjacency),
            "batches": self.batches,
            "checkpoints": self.store.saves,
        }


def enumerate_primitive(n: int, workers: int = 1, checkpoint_path: Optional[str] = None,
                        checkpoint_every: int = DEFAULT_BATCH,
                        perturbation: Fraction = DEFAULT_PERTURBATION) -> EnumerationResult:
    """All primitive iso-edge domains up to GL_n(Z), sorted by canonical key."""
    enumerator = IsoEdgeEnumerator(n, workers, checkpoint_path, checkpoint_every, perturbation)
    return enumerator.run_primitive()


def enumerate_cells(n: int, min_dim: int = 1, workers: int = 1, checkpoint_path: Optional[str] = None,
                    checkpoint_every: int = DEFAULT_BATCH,
                    perturbation: Fraction = DEFAULT_PERTURBATION) -> EnumerationResult:
    """All iso-edge cell orbits of dimension >= min_dim."""
    enumerator = IsoEdgeEnumerator(n, workers, checkpoint_path, checkpoint_every, perturbation)
    return enumerator.run_cells(min_dim)


def mass_sum(records: Sequence[CellRecord]) -> Fraction:
    """sum over cells with PD interior of (-1)^dim / |Stab|."""
    return sum((r.mass_term for r in records), Fraction(0))


def mass_check(n: int, records: Optional[Sequence[CellRecord]] = None, **kwargs) -> Fraction:
    """
    Evaluate the mass formula; zero is expected for n >= 3.

    Args:
        n (int): Dimension
        records: Complete cell census; computed when omitted
    """
    if n < 3:
        logger.warning("the mass formula is stated for n >= 3, evaluating n=%d anyway", n)
    if records is None:
        records = enumerate_cells(n, 1, **kwargs).records
    return mass_sum(records)


def flip_graph(result: EnumerationResult) -> nx.MultiGraph:
    """Domains as nodes, one edge per (domain, facet) flip."""
    graph = nx.MultiGraph()
    for record in result.top:
        graph.add_node(record.key, stabilizer=record.stabilizer)
    for parent, facet, child in result.adjacency:
        graph.add_edge(parent, child, facet=facet)
    return graph
