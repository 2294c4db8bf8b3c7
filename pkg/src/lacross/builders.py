"""Circuit builders: syndrome rounds, memory experiments, teleported gadgets.

Syndrome extraction uses one fresh |+> ancilla per check: CX couplings read
X checks, CZ couplings read Z checks, and every ancilla is measured in the
X basis. Within a round the full X layer precedes the full Z layer, and
checks are coupled in ascending row order.

The teleported-Hadamard gadget attaches a d_BS x d_BS Bacon-Shor patch
prepared in |+>^(d^2) with only its ZZ gauges tracked. Each patch row is
coupled transversally to one member of a disjoint family of logical
representatives: CX (patch controls) onto an X-logical family, then CZ onto
a Z-logical family, with a joint error-correction round in between. The
patch and then the data are read out transversally in the X basis.

Detector and observable measurement sets are not written by hand: every one
is derived by conjugating the relevant check or readout operator backward
through the circuit (see backprop), so stabilizer reshuffling caused by the
transversal steps is picked up mechanically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .backprop import BackwardWalker, PeelPoint, WalkError
from .circuit import Circuit
from .codes import BaconShorCode, LaCrossCode, build_bacon_shor
from .gf2 import BitVector, RowspaceReducer
from .logicals import (
    LogicalPair,
    RepresentativePartition,
    logical_basis,
    representative_partition,
)


@dataclass
class RoundRecord:
    """Measurement bookkeeping for one extraction round."""

    x_meas: list[int]
    z_meas: list[int]
    x_gap: int  # instruction gap just before the X-ancilla readout
    z_gap: int
    end_gap: int


@dataclass
class GaugeRecord:
    """Same bookkeeping for a Bacon-Shor ZZ-gauge round."""

    meas: list[int]
    gap: int
    end_gap: int


def _check_layer(circuit: Circuit, supports: list[list[int]], anc_base: int, gate: str):
    """Fresh |+> ancillas, one coupling instruction per check, X readout."""
    ancs = list(range(anc_base, anc_base + len(supports)))
    circuit.append("RESET_X", ancs)
    for anc, supp in zip(ancs, supports):
        targets: list[int] = []
        for q in supp:
            targets += [anc, q]
        circuit.append(gate, targets)
    gap = len(circuit.instructions)
    m0 = circuit.num_measurements
    circuit.append("MEASURE_X", ancs)
    return list(range(m0, m0 + len(ancs))), gap


def append_syndrome_round(
    circuit: Circuit, code: LaCrossCode, x_anc_base: int, z_anc_base: int
) -> RoundRecord:
    """One full extraction round: all X checks, then all Z checks."""
    hx_supp = [sorted(code.hx.row(i).support()) for i in range(code.hx.nrows)]
    hz_supp = [sorted(code.hz.row(i).support()) for i in range(code.hz.nrows)]
    x_meas, x_gap = _check_layer(circuit, hx_supp, x_anc_base, "CX")
    z_meas, z_gap = _check_layer(circuit, hz_supp, z_anc_base, "CZ")
    circuit.append("TICK")
    return RoundRecord(x_meas, z_meas, x_gap, z_gap, len(circuit.instructions))


def append_gauge_round(
    circuit: Circuit, bs: BaconShorCode, bs_base: int, gauge_anc_base: int
) -> GaugeRecord:
    """One Bacon-Shor round measuring every horizontal ZZ gauge."""
    supports = [
        [bs_base + q for q in sorted(bs.gauge_z.row(g).support())]
        for g in range(bs.gauge_z.nrows)
    ]
    meas, gap = _check_layer(circuit, supports, gauge_anc_base, "CZ")
    circuit.append("TICK")
    return GaugeRecord(meas, gap, len(circuit.instructions))


def _round_peels(code: LaCrossCode, rec: RoundRecord, red_x, red_z) -> list[PeelPoint]:
    n = code.num_qubits
    return [
        PeelPoint(rec.end_gap, "X", 0, n, red_x, rec.x_meas),
        PeelPoint(rec.end_gap, "Z", 0, n, red_z, rec.z_meas),
    ]


def _ancilla_pauli(nq: int, anc: int) -> BitVector:
    return BitVector.from_support(nq, [anc])


def _derive_round_detectors(
    walker: BackwardWalker,
    nq: int,
    rec: RoundRecord,
    x_ancs: list[int],
    z_ancs: list[int],
    expect_x_skipped: bool,
) -> list[tuple[int, ...]]:
    """Walk every check outcome of one round back to a deterministic parity.

    A first-round X check on |0...0> data has a genuinely random outcome;
    those walks must fail, and nothing else may.
    """
    dets: list[tuple[int, ...]] = []
    zero = BitVector(nq)
    for i, anc in enumerate(x_ancs):
        try:
            dets.append(
                walker.walk(_ancilla_pauli(nq, anc), zero, rec.x_gap, {rec.x_meas[i]})
            )
        except WalkError:
            if not expect_x_skipped:
                raise
    for j, anc in enumerate(z_ancs):
        dets.append(
            walker.walk(_ancilla_pauli(nq, anc), zero, rec.z_gap, {rec.z_meas[j]})
        )
    return dets


def build_memory_experiment(code: LaCrossCode, rounds: int) -> Circuit:
    """Z-basis memory: |0...0> data, `rounds` extraction rounds, Z readout.

    The observable is the lowest-index logical Z, read from the final data
    measurement; it commutes with every coupling layer so no syndrome
    corrections are needed.
    """
    assert rounds >= 1
    n = code.num_qubits
    rx, rz = code.hx.nrows, code.hz.nrows
    x_ancs = list(range(n, n + rx))
    z_ancs = list(range(n + rx, n + rx + rz))

    circuit = Circuit()
    circuit.append("RESET_Z", range(n))
    red_x = RowspaceReducer(code.hx)
    red_z = RowspaceReducer(code.hz)
    recs: list[RoundRecord] = []
    peels: list[PeelPoint] = []
    for _ in range(rounds):
        rec = append_syndrome_round(circuit, code, x_ancs[0], z_ancs[0])
        recs.append(rec)
        peels += _round_peels(code, rec, red_x, red_z)

    final_gap = len(circuit.instructions)
    m0 = circuit.num_measurements
    circuit.append("MEASURE_Z", range(n))
    final_meas = list(range(m0, m0 + n))

    nq = circuit.num_qubits
    walker = BackwardWalker(circuit, peels)
    detectors: list[tuple[int, ...]] = []
    for t, rec in enumerate(recs):
        detectors += _derive_round_detectors(
            walker, nq, rec, x_ancs, z_ancs, expect_x_skipped=(t == 0)
        )
    # end-of-circuit checks recomputed from the transversal data readout
    zero = BitVector(nq)
    for j in range(rz):
        supp = sorted(code.hz.row(j).support())
        op = BitVector.from_support(nq, supp)
        detectors.append(walker.walk(zero, op, final_gap, {final_meas[q] for q in supp}))

    for refs in detectors:
        circuit.append("DETECTOR", refs)
    logical_z = logical_basis(code)[0].z
    circuit.append("OBSERVABLE", [final_meas[q] for q in sorted(logical_z.support())], 0)
    circuit.validate()
    return circuit


def _group_rep_by_line(
    code: LaCrossCode, rep: BitVector, kind: str
) -> list[list[int]]:
    """Split a main-lattice representative into its row (X) or column (Z)
    strings, each sorted along the line; line order is ascending."""
    n = code.spec.n
    lines: dict[int, list[int]] = {}
    for q in sorted(rep.support()):
        assert q < n * n, "transversal coupling needs main-lattice support"
        line = q // n if kind == "X" else q % n
        lines.setdefault(line, []).append(q)
    return [lines[line] for line in sorted(lines)]


def transversal_steps(
    code: LaCrossCode,
    partition: RepresentativePartition,
    bs: BaconShorCode,
    bs_base: int,
) -> list[list[tuple[int, int]]]:
    """Couplings between Bacon-Shor rows and one representative family.

    Representative r is carried by patch row r. Each of its line strings
    becomes one sub-step: the j-th qubit along the string pairs with patch
    qubit (r, j). Strings never exceed the patch width, and every data qubit
    is coupled exactly once, so Z support flowing back onto the patch lands
    inside single rows (where it is a product of ZZ gauges).
    """
    steps: list[list[tuple[int, int]]] = []
    for r, rep in enumerate(partition.reps):
        for s, string in enumerate(_group_rep_by_line(code, rep, partition.kind)):
            assert len(string) <= bs.d
            while len(steps) <= s:
                steps.append([])
            for j, q in enumerate(string):
                steps[s].append((bs_base + bs.index(r, j), q))
    return steps


@dataclass
class GadgetPlan:
    """Layout and bookkeeping for one teleported-gadget circuit."""

    code: LaCrossCode
    bs: BaconShorCode
    x_pair: tuple[int, int]
    z_pair: tuple[int, int]
    x_partition: RepresentativePartition
    z_partition: RepresentativePartition
    bs_base: int
    gauge_base: int
    rounds: int
    tcnot_steps: list[list[tuple[int, int]]] = field(default_factory=list)
    tcz_steps: list[list[tuple[int, int]]] = field(default_factory=list)
    round_records: list[RoundRecord] = field(default_factory=list)
    gauge_records: list[GaugeRecord] = field(default_factory=list)
    bs_final_meas: list[int] = field(default_factory=list)
    data_final_meas: list[int] = field(default_factory=list)
    observable: tuple[int, ...] = ()


def _emit_transversal(circuit: Circuit, steps: list[list[tuple[int, int]]], gate: str) -> None:
    for pairs in steps:
        targets: list[int] = []
        for bs_q, data_q in pairs:
            targets += [bs_q, data_q]
        circuit.append(gate, targets)
        circuit.append("TICK")


def build_generic_gadget(
    code: LaCrossCode,
    x_pair: tuple[int, int] = (0, 0),
    z_pair: tuple[int, int] | None = None,
    rounds: int | None = None,
) -> tuple[Circuit, GadgetPlan]:
    """Teleported gadget addressing the chosen X and Z logical pairs.

    Sequence: data |0...0| prep and one extraction round; patch |+>^(d^2)
    prep and one gauge round; transversal CX (patch rows onto the X-logical
    family); joint round (full extraction plus gauges); transversal CZ
    (patch rows onto the Z-logical family); remaining extraction rounds;
    transversal X readout of the patch and then of the data. With
    x_pair == z_pair this is the teleported-Hadamard gadget.
    """
    if z_pair is None:
        z_pair = x_pair
    if rounds is None:
        rounds = code.distance
    assert rounds >= 2, "need the initial round and the joint round"
    kdim = code.kernel.nrows
    pairs = logical_basis(code)
    px = pairs[x_pair[0] * kdim + x_pair[1]]
    pz = pairs[z_pair[0] * kdim + z_pair[1]]
    d_bs = max(px.x_length, pz.z_length)
    x_part = representative_partition(code, px, "X", count=d_bs)
    z_part = representative_partition(code, pz, "Z", count=d_bs)
    bs = build_bacon_shor(d_bs)

    n = code.num_qubits
    rx, rz = code.hx.nrows, code.hz.nrows
    x_ancs = list(range(n, n + rx))
    z_ancs = list(range(n + rx, n + rx + rz))
    bs_base = n + rx + rz
    gauge_base = bs_base + bs.num_qubits
    gauge_ancs = list(range(gauge_base, gauge_base + bs.gauge_z.nrows))
    bs_qubits = list(range(bs_base, bs_base + bs.num_qubits))

    plan = GadgetPlan(
        code=code, bs=bs, x_pair=x_pair, z_pair=z_pair,
        x_partition=x_part, z_partition=z_part,
        bs_base=bs_base, gauge_base=gauge_base, rounds=rounds,
    )
    plan.tcnot_steps = transversal_steps(code, x_part, bs, bs_base)
    plan.tcz_steps = transversal_steps(code, z_part, bs, bs_base)

    red_x = RowspaceReducer(code.hx)
    red_z = RowspaceReducer(code.hz)
    red_g = RowspaceReducer(bs.gauge_z)

    circuit = Circuit()
    peels: list[PeelPoint] = []

    def ldpc_round() -> None:
        rec = append_syndrome_round(circuit, code, x_ancs[0], z_ancs[0])
        plan.round_records.append(rec)
        peels.extend(_round_peels(code, rec, red_x, red_z))

    def gauge_round() -> None:
        grec = append_gauge_round(circuit, bs, bs_base, gauge_base)
        plan.gauge_records.append(grec)
        peels.append(PeelPoint(grec.end_gap, "Z", bs_base, bs.num_qubits, red_g, grec.meas))

    circuit.append("RESET_Z", range(n))
    ldpc_round()
    circuit.append("RESET_X", bs_qubits)
    gauge_round()
    _emit_transversal(circuit, plan.tcnot_steps, "CX")
    ldpc_round()
    gauge_round()
    _emit_transversal(circuit, plan.tcz_steps, "CZ")
    for _ in range(rounds - 2):
        ldpc_round()

    bs_meas_gap = len(circuit.instructions)
    m0 = circuit.num_measurements
    circuit.append("MEASURE_X", bs_qubits)
    plan.bs_final_meas = list(range(m0, m0 + bs.num_qubits))
    data_meas_gap = len(circuit.instructions)
    m0 = circuit.num_measurements
    circuit.append("MEASURE_X", range(n))
    plan.data_final_meas = list(range(m0, m0 + n))

    nq = circuit.num_qubits
    walker = BackwardWalker(circuit, peels)
    zero = BitVector(nq)
    detectors: list[tuple[int, ...]] = []

    # chronological: initial round, then per-epoch LDPC and gauge rounds
    detectors += _derive_round_detectors(
        walker, nq, plan.round_records[0], x_ancs, z_ancs, expect_x_skipped=True
    )
    for g, anc in enumerate(gauge_ancs):  # first gauge round: all outcomes random
        try:
            walker.walk(_ancilla_pauli(nq, anc), zero,
                        plan.gauge_records[0].gap, {plan.gauge_records[0].meas[g]})
            raise AssertionError("first gauge round should be nondeterministic")
        except WalkError:
            pass
    detectors += _derive_round_detectors(
        walker, nq, plan.round_records[1], x_ancs, z_ancs, expect_x_skipped=False
    )
    grec = plan.gauge_records[1]
    for g, anc in enumerate(gauge_ancs):
        detectors.append(walker.walk(_ancilla_pauli(nq, anc), zero, grec.gap, {grec.meas[g]}))
    for rec in plan.round_records[2:]:
        detectors += _derive_round_detectors(walker, nq, rec, x_ancs, z_ancs, False)

    # end-of-circuit checks from the transversal X readouts
    for i in range(rx):
        supp = sorted(code.hx.row(i).support())
        op = BitVector.from_support(nq, supp)
        detectors.append(
            walker.walk(op, zero, data_meas_gap, {plan.data_final_meas[q] for q in supp})
        )
    for s in range(bs.stabilizers_x.nrows):
        supp = sorted(bs.stabilizers_x.row(s).support())
        op = BitVector.from_support(nq, [bs_base + q for q in supp])
        detectors.append(
            walker.walk(op, zero, bs_meas_gap, {plan.bs_final_meas[q] for q in supp})
        )

    # joint observable: patch logical X times the canonical X representative
    row0 = [bs_base + bs.index(0, j) for j in range(bs.d)]
    rep0 = sorted(x_part.reps[0].support())
    obs_op = BitVector.from_support(nq, row0 + rep0)
    seed = {plan.bs_final_meas[q - bs_base] for q in row0}
    seed |= {plan.data_final_meas[q] for q in rep0}
    plan.observable = walker.walk(obs_op, zero, bs_meas_gap, seed)

    for refs in detectors:
        circuit.append("DETECTOR", refs)
    circuit.append("OBSERVABLE", plan.observable, 0)
    circuit.validate()
    return circuit, plan


def build_hadamard_gadget(
    code: LaCrossCode, pair: tuple[int, int] = (0, 0), rounds: int | None = None
) -> tuple[Circuit, GadgetPlan]:
    """Teleported Hadamard on one addressed logical pair."""
    return build_generic_gadget(code, x_pair=pair, z_pair=pair, rounds=rounds)
