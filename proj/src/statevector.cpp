#include "qfd/statevector.hpp"

#include "qfd/error.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

namespace qfd {

namespace {

// Below this size the OpenMP fork costs more than the loop.
constexpr std::int64_t kParallelThreshold = std::int64_t{1} << 14;

void check_qubit(int qubit, int n_qubits) {
    if (qubit < 0 || qubit >= n_qubits) {
        throw IndexError("qubit index " + std::to_string(qubit) + " out of range for " + std::to_string(n_qubits) + "-qubit register");
    }
}

// Applies the 2x2 matrix [[m00, m01], [m10, m11]] to qubit q.
void apply_single(std::span<cplx> amps, int q, cplx m00, cplx m01, cplx m10, cplx m11) {
    const std::int64_t stride = std::int64_t{1} << q;
    const std::int64_t half = static_cast<std::int64_t>(amps.size()) / 2;
    cplx *a = amps.data();
#pragma omp parallel for if (half >= kParallelThreshold) schedule(static)
    for (std::int64_t p = 0; p < half; ++p) {
        // insert a zero at bit q of p
        const std::int64_t lo = ((p >> q) << (q + 1)) | (p & (stride - 1));
        const std::int64_t hi = lo | stride;
        const cplx a0 = a[lo];
        const cplx a1 = a[hi];
        a[lo] = m00 * a0 + m01 * a1;
        a[hi] = m10 * a0 + m11 * a1;
    }
}

void apply_hadamard(std::span<cplx> amps, int q) {
    const std::int64_t stride = std::int64_t{1} << q;
    const std::int64_t half = static_cast<std::int64_t>(amps.size()) / 2;
    const double s = 1.0 / std::sqrt(2.0);
    cplx *a = amps.data();
#pragma omp parallel for if (half >= kParallelThreshold) schedule(static)
    for (std::int64_t p = 0; p < half; ++p) {
        const std::int64_t lo = ((p >> q) << (q + 1)) | (p & (stride - 1));
        const std::int64_t hi = lo | stride;
        const cplx a0 = a[lo];
        const cplx a1 = a[hi];
        a[lo] = s * (a0 + a1);
        a[hi] = s * (a0 - a1);
    }
}

void apply_rz(std::span<cplx> amps, int q, double theta) {
    const std::int64_t mask = std::int64_t{1} << q;
    const cplx phase0 = std::polar(1.0, -0.5 * theta);
    const cplx phase1 = std::polar(1.0, 0.5 * theta);
    const std::int64_t dim = static_cast<std::int64_t>(amps.size());
    cplx *a = amps.data();
#pragma omp parallel for if (dim >= kParallelThreshold) schedule(static)
    for (std::int64_t k = 0; k < dim; ++k) {
        a[k] *= (k & mask) ? phase1 : phase0;
    }
}

void apply_zz(std::span<cplx> amps, int qa, int qb, double theta) {
    const cplx same = std::polar(1.0, -theta);
    const cplx diff = std::polar(1.0, theta);
    const std::int64_t dim = static_cast<std::int64_t>(amps.size());
    cplx *a = amps.data();
#pragma omp parallel for if (dim >= kParallelThreshold) schedule(static)
    for (std::int64_t k = 0; k < dim; ++k) {
        const bool ba = (k >> qa) & 1;
        const bool bb = (k >> qb) & 1;
        a[k] *= (ba == bb) ? same : diff;
    }
}

void apply_cz(std::span<cplx> amps, int qa, int qb) {
    const std::int64_t mask = (std::int64_t{1} << qa) | (std::int64_t{1} << qb);
    const std::int64_t dim = static_cast<std::int64_t>(amps.size());
    cplx *a = amps.data();
#pragma omp parallel for if (dim >= kParallelThreshold) schedule(static)
    for (std::int64_t k = 0; k < dim; ++k) {
        if ((k & mask) == mask) {
            a[k] = -a[k];
        }
    }
}

}  // namespace

Statevector::Statevector(int n_qubits, int max_qubits) : n_qubits_{n_qubits} {
    if (n_qubits < 1) {
        throw ValueError("register needs at least 1 qubit, got " + std::to_string(n_qubits));
    }
    if (n_qubits > max_qubits) {
        throw CapacityError("requested " + std::to_string(n_qubits) + " qubits exceeds the limit of " + std::to_string(max_qubits));
    }
    amplitudes_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
    amplitudes_[0] = 1.0;
}

Statevector::Statevector(int n_qubits, std::vector<cplx> amplitudes) : n_qubits_{n_qubits}, amplitudes_{std::move(amplitudes)} {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw CapacityError("qubit count " + std::to_string(n_qubits) + " outside [1, " + std::to_string(kMaxQubits) + "]");
    }
    if (amplitudes_.size() != (std::size_t{1} << n_qubits)) {
        throw DimensionError("expected " + std::to_string(std::size_t{1} << n_qubits) + " amplitudes, got " + std::to_string(amplitudes_.size()));
    }
}

double Statevector::norm_squared() const noexcept {
    double sum = 0.0;
    for (const cplx &a : amplitudes_) {
        sum += std::norm(a);
    }
    return sum;
}

std::string to_string(GateKind kind) {
    switch (kind) {
        case GateKind::H: return "H";
        case GateKind::RZ: return "RZ";
        case GateKind::RY: return "RY";
        case GateKind::ZZ: return "ZZ";
        case GateKind::CZ: return "CZ";
    }
    return "?";
}

int arity(GateKind kind) noexcept {
    return (kind == GateKind::ZZ || kind == GateKind::CZ) ? 2 : 1;
}

void Gate::validate(int n_qubits) const {
    check_qubit(targets[0], n_qubits);
    if (arity(kind) == 2) {
        check_qubit(targets[1], n_qubits);
        if (targets[0] == targets[1]) {
            throw IndexError(to_string(kind) + " gate targets must be distinct, got qubit " + std::to_string(targets[0]) + " twice");
        }
    }
    if (!std::isfinite(angle)) {
        throw ValueError(to_string(kind) + " gate angle is not finite");
    }
}

void Circuit::append(const Circuit &other) {
    if (other.n_qubits != n_qubits) {
        throw DimensionError("cannot append a " + std::to_string(other.n_qubits) + "-qubit circuit to a " + std::to_string(n_qubits) + "-qubit circuit");
    }
    gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

void Circuit::validate() const {
    for (const Gate &g : gates) {
        g.validate(n_qubits);
    }
}

Circuit inverse(const Circuit &circuit) {
    Circuit inv{circuit.n_qubits, {}};
    inv.gates.reserve(circuit.gates.size());
    for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
        Gate g = *it;
        g.angle = -g.angle;
        inv.gates.push_back(g);
    }
    return inv;
}

Statevector zero_state(int n_qubits, int max_qubits) {
    return Statevector(n_qubits, max_qubits);
}

void apply_gate(Statevector &state, const Gate &gate) {
    gate.validate(state.n_qubits());
    std::span<cplx> amps = state.amplitudes();
    const int q0 = gate.targets[0];
    const int q1 = gate.targets[1];
    switch (gate.kind) {
        case GateKind::H:
            apply_hadamard(amps, q0);
            break;
        case GateKind::RZ:
            apply_rz(amps, q0, gate.angle);
            break;
        case GateKind::RY: {
            const double c = std::cos(0.5 * gate.angle);
            const double s = std::sin(0.5 * gate.angle);
            apply_single(amps, q0, c, -s, s, c);
            break;
        }
        case GateKind::ZZ:
            apply_zz(amps, q0, q1, gate.angle);
            break;
        case GateKind::CZ:
            apply_cz(amps, q0, q1);
            break;
    }
}

void run_circuit(Statevector &state, const Circuit &circuit) {
    if (circuit.n_qubits != state.n_qubits()) {
        throw DimensionError("circuit acts on " + std::to_string(circuit.n_qubits) + " qubits but state has " + std::to_string(state.n_qubits()));
    }
    for (const Gate &g : circuit.gates) {
        apply_gate(state, g);
    }
}

cplx inner_product(const Statevector &a, const Statevector &b) {
    if (a.n_qubits() != b.n_qubits()) {
        throw DimensionError("inner product of " + std::to_string(a.n_qubits()) + "- and " + std::to_string(b.n_qubits()) + "-qubit states");
    }
    const std::int64_t dim = static_cast<std::int64_t>(a.dimension());
    const cplx *pa = a.amplitudes().data();
    const cplx *pb = b.amplitudes().data();
    double re = 0.0;
    double im = 0.0;
#pragma omp parallel for if (dim >= kParallelThreshold) reduction(+ : re, im) schedule(static)
    for (std::int64_t k = 0; k < dim; ++k) {
        const cplx t = std::conj(pa[k]) * pb[k];
        re += t.real();
        im += t.imag();
    }
    return {re, im};
}

double pauli_expectation(const Statevector &state, Pauli pauli, int qubit) {
    check_qubit(qubit, state.n_qubits());
    const std::span<const cplx> amps = state.amplitudes();
    const std::size_t mask = std::size_t{1} << qubit;
    double sum = 0.0;
    if (pauli == Pauli::Z) {
        for (std::size_t k = 0; k < amps.size(); ++k) {
            sum += (k & mask) ? -std::norm(amps[k]) : std::norm(amps[k]);
        }
        return sum;
    }
    // X and Y couple |..0..> with |..1..> on the target bit.
    for (std::size_t k = 0; k < amps.size(); ++k) {
        if (k & mask) {
            continue;
        }
        const cplx z = std::conj(amps[k]) * amps[k | mask];
        sum += (pauli == Pauli::X) ? z.real() : z.imag();
    }
    return 2.0 * sum;
}

}  // namespace qfd
