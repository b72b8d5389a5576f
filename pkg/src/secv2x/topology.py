"""Urban crossroad scenario: lanes, platoon placement, link derivation, mobility."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

ROLE_LEADER = "leader"
ROLE_MEMBER = "member"
ROLE_FREE = "free"


class CapacityError(ValueError):
    """Requested vehicle count does not fit on the lane grid."""


class LinkDerivationError(ValueError):
    """Link sets cannot be built for this topology."""


@dataclass
class TopologyParams:
    scenario_length_m: float = 1299.0
    scenario_width_m: float = 750.0
    lane_width_m: float = 3.5
    lanes_per_direction: int = 4
    num_directions: int = 4
    blocks_x: int = 3
    blocks_y: int = 3
    platoon_size: int = 5
    platoon_gap_m: float = 2.5
    platoon_speed_kmh: float = 60.0
    bs_pos: tuple = (649.5, 375.0)
    # building corner at the central intersection of the default 3x3 grid
    eavesdropper_pos: tuple = (447.0, 264.0)

    @property
    def speed_ms(self) -> float:
        return self.platoon_speed_kmh / 3.6

    @property
    def road_half_width_m(self) -> float:
        return self.lanes_per_direction * self.lane_width_m

    def validate(self):
        if self.platoon_size < 2:
            raise ValueError("platoon_size must be >= 2 (a leader and at least one member)")
        if self.platoon_gap_m <= 0:
            raise ValueError("platoon_gap_m must be positive")
        if self.num_directions != 4:
            raise ValueError("only the 4-direction crossroad grid is supported")
        if self.scenario_length_m <= 0 or self.scenario_width_m <= 0:
            raise ValueError("scenario dimensions must be positive")


@dataclass(frozen=True)
class Lane:
    axis: str       # "h": travel along x at fixed y; "v": travel along y at fixed x
    offset: float   # the fixed coordinate of the lane centerline
    direction: int  # +1 or -1 along the travel axis
    length: float


@dataclass
class Vehicle:
    id: int
    lane: Lane
    s: float        # longitudinal position along the lane axis, in [0, lane.length)
    speed: float
    role: str
    platoon_id: int | None = None

    @property
    def position(self) -> np.ndarray:
        if self.lane.axis == "h":
            return np.array([self.s, self.lane.offset])
        return np.array([self.lane.offset, self.s])

    @property
    def heading(self) -> np.ndarray:
        if self.lane.axis == "h":
            return np.array([float(self.lane.direction), 0.0])
        return np.array([0.0, float(self.lane.direction)])


@dataclass
class Topology:
    params: TopologyParams
    vehicles: list
    platoons: list            # per platoon: vehicle ids, leader first
    lanes: list
    blocks: np.ndarray        # (B, 4) building rectangles (xmin, ymin, xmax, ymax)
    bs_pos: np.ndarray
    eavesdropper_pos: np.ndarray
    v2v_links: list = field(default_factory=list)   # (tx_id, rx_id) pairs
    v2i_links: list = field(default_factory=list)   # tx vehicle ids, length N

    @property
    def num_v2v_links(self) -> int:
        return len(self.v2v_links)

    def positions(self) -> np.ndarray:
        return np.array([v.position for v in self.vehicles])

    def role_of_link(self, m: int) -> str:
        return self.vehicles[self.v2v_links[m][0]].role

    def platoon_of_vehicle(self, vid: int) -> int | None:
        return self.vehicles[vid].platoon_id


def build_lanes(params: TopologyParams) -> list:
    """Lane centerlines of the crossroad grid, right-hand traffic.

    Boundary roads keep only the half that falls inside the scenario
    rectangle, so every lane centerline lies within bounds.
    """
    lanes = []
    xs = [params.scenario_length_m * i / params.blocks_x for i in range(params.blocks_x + 1)]
    ys = [params.scenario_width_m * j / params.blocks_y for j in range(params.blocks_y + 1)]
    w = params.lane_width_m
    for xc in xs:
        for k in range(params.lanes_per_direction):
            off = (k + 0.5) * w
            if xc + off <= params.scenario_length_m:
                lanes.append(Lane("v", xc + off, +1, params.scenario_width_m))
            if xc - off >= 0.0:
                lanes.append(Lane("v", xc - off, -1, params.scenario_width_m))
    for yc in ys:
        for k in range(params.lanes_per_direction):
            off = (k + 0.5) * w
            if yc - off >= 0.0:
                lanes.append(Lane("h", yc - off, +1, params.scenario_length_m))
            if yc + off <= params.scenario_width_m:
                lanes.append(Lane("h", yc + off, -1, params.scenario_length_m))
    return lanes


def build_blocks(params: TopologyParams) -> np.ndarray:
    """Building rectangles between road corridors."""
    xs = [params.scenario_length_m * i / params.blocks_x for i in range(params.blocks_x + 1)]
    ys = [params.scenario_width_m * j / params.blocks_y for j in range(params.blocks_y + 1)]
    half = params.road_half_width_m
    rects = []
    for i in range(params.blocks_x):
        for j in range(params.blocks_y):
            x0, x1 = xs[i] + half, xs[i + 1] - half
            y0, y1 = ys[j] + half, ys[j + 1] - half
            if x1 > x0 and y1 > y0:
                rects.append((x0, y0, x1, y1))
    return np.array(rects)


def segments_clear(p: np.ndarray, q: np.ndarray, blocks: np.ndarray) -> np.ndarray:
    """True per segment p[i]->q[i] when no building rectangle is crossed.

    Liang-Barsky clipping, vectorized over segments for each block.
    """
    p = np.atleast_2d(p).astype(float)
    q = np.atleast_2d(q).astype(float)
    clear = np.ones(len(p), dtype=bool)
    d = q - p
    for (x0, y0, x1, y1) in blocks:
        t0 = np.zeros(len(p))
        t1 = np.ones(len(p))
        inside = np.ones(len(p), dtype=bool)
        for k, (lo, hi) in enumerate(((x0, x1), (y0, y1))):
            dk = d[:, k]
            pk = p[:, k]
            with np.errstate(divide="ignore", invalid="ignore"):
                ta = (lo - pk) / dk
                tb = (hi - pk) / dk
            near = np.minimum(ta, tb)
            far = np.maximum(ta, tb)
            parallel = dk == 0.0
            out = parallel & ((pk <= lo) | (pk >= hi))
            inside &= ~out
            near = np.where(parallel, -np.inf, near)
            far = np.where(parallel, np.inf, far)
            t0 = np.maximum(t0, near)
            t1 = np.minimum(t1, far)
        hit = inside & (t0 < t1)
        clear &= ~hit
    return clear


def line_of_sight(topology: Topology, a: np.ndarray, b: np.ndarray) -> bool:
    return bool(segments_clear(np.asarray(a)[None, :], np.asarray(b)[None, :], topology.blocks)[0])


def _platoon_span(params: TopologyParams) -> float:
    return (params.platoon_size - 1) * params.platoon_gap_m


def _fits(intervals: list, lo: float, hi: float, margin: float) -> bool:
    return all(hi + margin <= a or lo - margin >= b for a, b in intervals)


def generate_topology(num_vehicles: int, rng: np.random.Generator,
                      params: TopologyParams | None = None) -> Topology:
    """Place platoons (and remainder free vehicles) on the lane grid.

    Vehicles in a platoon sit `platoon_gap_m` apart behind the leader; a
    margin of one gap separates occupants of the same lane.
    """
    params = params or TopologyParams()
    params.validate()
    lanes = build_lanes(params)
    blocks = build_blocks(params)

    num_platoons, num_free = divmod(num_vehicles, params.platoon_size)
    span = _platoon_span(params)
    gap = params.platoon_gap_m
    total_lane_len = sum(l.length for l in lanes)
    demand = num_platoons * (span + 2 * gap) + num_free * 2 * gap
    if demand > 0.5 * total_lane_len:
        raise CapacityError(
            f"{num_vehicles} vehicles need ~{demand:.0f} m of lane but only "
            f"{total_lane_len:.0f} m exist ({len(lanes)} lanes)")

    occupied: dict = {i: [] for i in range(len(lanes))}
    vehicles: list = []
    platoons: list = []
    speed = params.speed_ms

    def place(unit_span: float) -> tuple:
        for _ in range(400):
            li = int(rng.integers(len(lanes)))
            lane = lanes[li]
            if lane.length <= unit_span + 2 * gap:
                continue
            if lane.direction > 0:
                s_head = unit_span + float(rng.random()) * (lane.length - unit_span)
                lo, hi = s_head - unit_span, s_head
            else:
                s_head = float(rng.random()) * (lane.length - unit_span)
                lo, hi = s_head, s_head + unit_span
            if _fits(occupied[li], lo, hi, gap):
                occupied[li].append((lo, hi))
                return li, s_head
        raise CapacityError(
            f"could not place {num_vehicles} vehicles after 400 attempts; "
            "reduce the count or the platoon gap")

    for pid in range(num_platoons):
        li, s_head = place(span)
        lane = lanes[li]
        ids = []
        for k in range(params.platoon_size):
            vid = len(vehicles)
            role = ROLE_LEADER if k == 0 else ROLE_MEMBER
            s = s_head - lane.direction * k * gap
            vehicles.append(Vehicle(vid, lane, s % lane.length, speed, role, pid))
            ids.append(vid)
        platoons.append(ids)

    for _ in range(num_free):
        li, s_head = place(0.0)
        vid = len(vehicles)
        vehicles.append(Vehicle(vid, lanes[li], s_head % lanes[li].length, speed, ROLE_FREE))

    return Topology(
        params=params,
        vehicles=vehicles,
        platoons=platoons,
        lanes=lanes,
        blocks=blocks,
        bs_pos=np.array(params.bs_pos, dtype=float),
        eavesdropper_pos=np.array(params.eavesdropper_pos, dtype=float),
    )


def derive_links(topology: Topology, num_subchannels: int) -> Topology:
    """Fill the V2V and V2I link sets (fixed for the rest of the run).

    V2V: the leader transmits to the first member; each member transmits to
    the member behind it; the last member transmits back to its predecessor.
    One transmission per platoon vehicle per subframe.

    V2I: the `num_subchannels` platoon leaders / free vehicles closest to the
    base station.
    """
    v2v = []
    for ids in topology.platoons:
        v2v.append((ids[0], ids[1]))
        for k in range(1, len(ids) - 1):
            v2v.append((ids[k], ids[k + 1]))
        v2v.append((ids[-1], ids[-2]))
    topology.v2v_links = v2v

    eligible = [v.id for v in topology.vehicles if v.role in (ROLE_LEADER, ROLE_FREE)]
    if len(eligible) < num_subchannels:
        raise LinkDerivationError(
            f"need {num_subchannels} V2I transmitters but only {len(eligible)} "
            "platoon leaders / free vehicles exist")
    bs = topology.bs_pos
    eligible.sort(key=lambda vid: (float(np.linalg.norm(topology.vehicles[vid].position - bs)), vid))
    topology.v2i_links = eligible[:num_subchannels]
    return topology


def advance(topology: Topology, dt: float) -> Topology:
    """Move every vehicle speed*dt along its lane, wrapping at the ends."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    for v in topology.vehicles:
        v.s = (v.s + v.lane.direction * v.speed * dt) % v.lane.length
    return topology


def displacement_vectors(topology: Topology, dt: float) -> np.ndarray:
    """Physical displacement of each vehicle over dt (wrap-free)."""
    return np.array([v.heading * v.speed * dt for v in topology.vehicles])
