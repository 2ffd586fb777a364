"""Network model: buses, branches, cases, admittance, and T&D partitioning.

All quantities are per-unit on the owning case's MVA base.  Bus ids are
normalized to 0..N-1; the original file ids survive in ``ext_ids``.  Every
type here is immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    CaseError,
    DisconnectedNetworkError,
    MissingBoundaryLinkError,
    NotRadialError,
    ZeroImpedanceBranchError,
)

MASTER = "master"
BOUNDARY = "boundary"
SLAVE = "slave"


@dataclass(frozen=True)
class Bus:
    """One network node.  Loads/generation are net scheduled values in pu."""

    id: int
    base_kv: float
    kind: str | None = None
    load_p: float = 0.0
    load_q: float = 0.0
    gen_p: float = 0.0
    gen_q: float = 0.0
    shunt_b: float = 0.0


@dataclass(frozen=True)
class Branch:
    """Series r+jx with total line-charging susceptance b_sh (pi model).

    ``tap`` is the off-nominal ratio on the from side; 1.0 means none.
    """

    from_bus: int
    to_bus: int
    r: float
    x: float
    b_sh: float = 0.0
    tap: float = 1.0

    def __post_init__(self):
        if self.from_bus == self.to_bus:
            raise CaseError(f"branch {self.from_bus}-{self.to_bus} is a self-loop")
        if self.r == 0.0 and self.x == 0.0:
            raise ZeroImpedanceBranchError(
                f"branch {self.from_bus}-{self.to_bus} has zero impedance"
            )

    @property
    def y_series(self) -> complex:
        return 1.0 / complex(self.r, self.x)


@dataclass(frozen=True)
class NetworkCase:
    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    base_mva: float
    slack_bus: int
    name: str = ""
    ext_ids: tuple = ()

    @property
    def n(self) -> int:
        return len(self.buses)

    def bus_array(self, field: str) -> np.ndarray:
        return np.array([getattr(b, field) for b in self.buses], dtype=float)

    def neighbors(self, bus: int) -> tuple[int, ...]:
        out = set()
        for br in self.branches:
            if br.from_bus == bus:
                out.add(br.to_bus)
            elif br.to_bus == bus:
                out.add(br.from_bus)
        return tuple(sorted(out))

    def branches_at(self, bus: int) -> tuple[int, ...]:
        return tuple(
            i for i, br in enumerate(self.branches) if bus in (br.from_bus, br.to_bus)
        )

    def validate(self) -> None:
        if self.base_mva <= 0:
            raise CaseError(f"base_mva must be positive, got {self.base_mva}")
        for i, b in enumerate(self.buses):
            if b.id != i:
                raise CaseError(f"bus ids not normalized: position {i} holds id {b.id}")
        if not 0 <= self.slack_bus < self.n:
            raise CaseError(f"slack bus {self.slack_bus} outside 0..{self.n - 1}")
        for br in self.branches:
            for end in (br.from_bus, br.to_bus):
                if not 0 <= end < self.n:
                    raise CaseError(f"branch {br.from_bus}-{br.to_bus} leaves the case")
        unreachable = _unreachable_from(self, self.slack_bus)
        if unreachable:
            names = [self.ext_ids[i] if self.ext_ids else i for i in unreachable]
            raise DisconnectedNetworkError(
                f"case {self.name or '<unnamed>'}: buses unreachable from slack: {names}"
            )

    def is_radial(self) -> bool:
        return len(self.branches) == self.n - 1


def _unreachable_from(case: NetworkCase, start: int) -> list[int]:
    seen = {start}
    stack = [start]
    adj: dict[int, list[int]] = {i: [] for i in range(case.n)}
    for br in case.branches:
        adj[br.from_bus].append(br.to_bus)
        adj[br.to_bus].append(br.from_bus)
    while stack:
        node = stack.pop()
        for nxt in adj[node]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return [i for i in range(case.n) if i not in seen]


def require_radial(case: NetworkCase) -> None:
    case.validate()
    if not case.is_radial():
        raise NotRadialError(
            f"case {case.name or '<unnamed>'}: {len(case.branches)} branches "
            f"for {case.n} buses (radial needs {case.n - 1})"
        )


@dataclass(frozen=True)
class AdmittanceMatrix:
    """Dense complex bus admittance matrix with cached real/imag parts."""

    y: np.ndarray

    @property
    def g(self) -> np.ndarray:
        return self.y.real

    @property
    def b(self) -> np.ndarray:
        return self.y.imag


def build_admittance(case: NetworkCase) -> AdmittanceMatrix:
    """Stamp every branch pi model plus bus shunts into a dense Y."""
    n = case.n
    y = np.zeros((n, n), dtype=complex)
    for br in case.branches:
        ys = br.y_series
        ysh = 0.5j * br.b_sh
        t = br.tap
        f, to = br.from_bus, br.to_bus
        y[f, f] += (ys + ysh) / (t * t)
        y[to, to] += ys + ysh
        y[f, to] -= ys / t
        y[to, f] -= ys / t
    for bus in case.buses:
        y[bus.id, bus.id] += 1j * bus.shunt_b
    return AdmittanceMatrix(y)


@dataclass(frozen=True)
class BoundaryLink:
    """Feeder ``feeder`` hangs off transmission bus ``transmission_bus``.

    The feeder's ``substation_bus`` and the transmission bus are the same
    electrical node after per-unit harmonization.
    """

    transmission_bus: int
    feeder: int
    substation_bus: int


@dataclass(frozen=True)
class IntegratedCase:
    transmission: NetworkCase
    feeders: tuple[NetworkCase, ...]
    links: tuple[BoundaryLink, ...]
    name: str = ""

    def validate(self) -> None:
        self.transmission.validate()
        if not self.feeders:
            raise CaseError("integrated case needs at least one feeder")
        linked = [l.feeder for l in self.links]
        for i, feeder in enumerate(self.feeders):
            require_radial(feeder)
            if linked.count(i) != 1:
                raise MissingBoundaryLinkError(
                    f"feeder {i} has {linked.count(i)} boundary links (needs exactly 1)"
                )
        for link in self.links:
            if not 0 <= link.transmission_bus < self.transmission.n:
                raise MissingBoundaryLinkError(
                    f"boundary bus {link.transmission_bus} missing from transmission case"
                )
            feeder = self.feeders[link.feeder]
            if not 0 <= link.substation_bus < feeder.n:
                raise MissingBoundaryLinkError(
                    f"substation bus {link.substation_bus} missing from feeder {link.feeder}"
                )
            if feeder.slack_bus != link.substation_bus:
                raise CaseError(
                    f"feeder {link.feeder}: slack bus {feeder.slack_bus} must be "
                    f"the substation {link.substation_bus}"
                )

    def link_for(self, feeder: int) -> BoundaryLink:
        for link in self.links:
            if link.feeder == feeder:
                return link
        raise MissingBoundaryLinkError(f"feeder {feeder} has no boundary link")


@dataclass(frozen=True)
class BoundarySystem:
    """Boundary bus k plus its transmission neighbors, in a fixed order.

    ``neighborhood[0]`` is always the boundary bus itself; the remaining
    entries are the adjacent transmission buses in ascending order.
    """

    index: int
    boundary_bus: int
    neighborhood: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.neighborhood)


@dataclass(frozen=True)
class Partition:
    """Node-role labels over the integrated bus set."""

    transmission_kinds: tuple[str, ...]
    feeder_kinds: tuple[tuple[str, ...], ...]
    systems: tuple[BoundarySystem, ...]

    def master_buses(self) -> tuple[int, ...]:
        return tuple(
            i for i, k in enumerate(self.transmission_kinds) if k == MASTER
        )

    def slave_buses(self, feeder: int) -> tuple[int, ...]:
        return tuple(
            i for i, k in enumerate(self.feeder_kinds[feeder]) if k == SLAVE
        )


def partition(integrated: IntegratedCase) -> Partition:
    """Label every bus master/boundary/slave and build the boundary systems."""
    integrated.validate()
    trans = integrated.transmission
    t_kinds = [MASTER] * trans.n
    systems = []
    for link in sorted(integrated.links, key=lambda l: l.feeder):
        k = link.transmission_bus
        t_kinds[k] = BOUNDARY
        neigh = tuple(n for n in trans.neighbors(k) if n != k)
        systems.append(
            BoundarySystem(
                index=link.feeder,
                boundary_bus=k,
                neighborhood=(k, *neigh),
            )
        )
    f_kinds = []
    for i, feeder in enumerate(integrated.feeders):
        sub = integrated.link_for(i).substation_bus
        f_kinds.append(
            tuple(BOUNDARY if b == sub else SLAVE for b in range(feeder.n))
        )
    return Partition(tuple(t_kinds), tuple(f_kinds), tuple(systems))


def to_common_per_unit(
    feeder: NetworkCase, boundary_base_kv: float, base_mva: float
) -> NetworkCase:
    """Rebase a feeder onto the common MVA base and the boundary kV level.

    Impedances scale with the MVA ratio (Z_base is inversely proportional
    to S_base), powers and shunt admittances with its inverse.  Bus kV
    labels are rescaled so the substation matches ``boundary_base_kv``.
    """
    if base_mva <= 0 or boundary_base_kv <= 0:
        raise CaseError("bases must be positive")
    sub_kv = feeder.buses[feeder.slack_bus].base_kv
    if sub_kv <= 0:
        raise CaseError("feeder substation base_kv must be positive")
    z_scale = base_mva / feeder.base_mva
    p_scale = feeder.base_mva / base_mva
    kv_scale = boundary_base_kv / sub_kv
    buses = tuple(
        replace(
            b,
            base_kv=b.base_kv * kv_scale,
            load_p=b.load_p * p_scale,
            load_q=b.load_q * p_scale,
            gen_p=b.gen_p * p_scale,
            gen_q=b.gen_q * p_scale,
            shunt_b=b.shunt_b * p_scale,
        )
        for b in feeder.buses
    )
    branches = tuple(
        replace(br, r=br.r * z_scale, x=br.x * z_scale, b_sh=br.b_sh * p_scale)
        for br in feeder.branches
    )
    return replace(feeder, buses=buses, branches=branches, base_mva=base_mva)


def merge_integrated(
    integrated: IntegratedCase,
) -> tuple[NetworkCase, tuple[np.ndarray, ...]]:
    """Collapse the boundary links into one flat case.

    Each feeder substation is identified with its transmission boundary bus;
    substation-local load/gen/shunt is added onto the boundary bus.  Returns
    the merged case and, per feeder, the map feeder-bus-index -> merged index.
    """
    trans = integrated.transmission
    buses = {b.id: b for b in trans.buses}
    branches = list(trans.branches)
    maps = []
    offset = trans.n
    for i, feeder in enumerate(integrated.feeders):
        link = integrated.link_for(i)
        fmap = np.empty(feeder.n, dtype=int)
        for b in feeder.buses:
            if b.id == link.substation_bus:
                fmap[b.id] = link.transmission_bus
                tb = buses[link.transmission_bus]
                buses[link.transmission_bus] = replace(
                    tb,
                    load_p=tb.load_p + b.load_p,
                    load_q=tb.load_q + b.load_q,
                    gen_p=tb.gen_p + b.gen_p,
                    gen_q=tb.gen_q + b.gen_q,
                    shunt_b=tb.shunt_b + b.shunt_b,
                )
            else:
                fmap[b.id] = offset
                buses[offset] = replace(b, id=offset, kind=None)
                offset += 1
        for br in feeder.branches:
            branches.append(
                replace(br, from_bus=int(fmap[br.from_bus]), to_bus=int(fmap[br.to_bus]))
            )
        maps.append(fmap)
    ext = list(trans.ext_ids) if trans.ext_ids else list(range(trans.n))
    for i, feeder in enumerate(integrated.feeders):
        fext = feeder.ext_ids if feeder.ext_ids else tuple(range(feeder.n))
        link = integrated.link_for(i)
        for b in range(feeder.n):
            if b != link.substation_bus:
                ext.append(f"f{i}:{fext[b]}")
    merged = NetworkCase(
        buses=tuple(buses[i] for i in range(offset)),
        branches=tuple(branches),
        base_mva=trans.base_mva,
        slack_bus=trans.slack_bus,
        name=(integrated.name or "integrated") + ":merged",
        ext_ids=tuple(ext),
    )
    merged.validate()
    return merged, tuple(maps)
