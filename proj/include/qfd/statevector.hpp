#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qfd {

using cplx = std::complex<double>;

/// Default hard cap on register width. 2^24 amplitudes occupy 256 MiB.
inline constexpr int kMaxQubits = 24;

/**
 * Dense pure state of an n-qubit register.
 *
 * Basis ordering is little-endian: qubit q addresses bit q of the amplitude
 * index. A Statevector is single-owner mutable; gate application may run in
 * parallel over amplitude strides internally.
 */
class Statevector {
  public:
    /// |0...0> on n qubits; throws CapacityError when n exceeds max_qubits.
    explicit Statevector(int n_qubits, int max_qubits = kMaxQubits);

    /// Takes ownership of explicit amplitudes; length must be 2^n_qubits.
    Statevector(int n_qubits, std::vector<cplx> amplitudes);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return amplitudes_.size(); }

    [[nodiscard]] std::span<const cplx> amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] std::span<cplx> amplitudes() noexcept { return amplitudes_; }

    [[nodiscard]] const cplx &operator[](std::size_t k) const { return amplitudes_[k]; }
    [[nodiscard]] cplx &operator[](std::size_t k) { return amplitudes_[k]; }

    [[nodiscard]] double norm_squared() const noexcept;

  private:
    int n_qubits_;
    std::vector<cplx> amplitudes_;
};

enum class GateKind { H, RZ, RY, ZZ, CZ };

enum class Pauli { X, Y, Z };

[[nodiscard]] std::string to_string(GateKind kind);
[[nodiscard]] int arity(GateKind kind) noexcept;

/**
 * One gate of the feature-map gate set.
 *
 * Conventions: H = (1/sqrt2)[[1,1],[1,-1]], RZ(t) = exp(-i t Z/2),
 * RY(t) = exp(-i t Y/2), ZZ(t) = exp(-i t Z(x)Z), CZ = diag(1,1,1,-1).
 * The angle is zero and ignored for H and CZ; targets[1] is unused for 1-qubit gates.
 */
struct Gate {
    GateKind kind = GateKind::H;
    std::array<int, 2> targets{0, 0};
    double angle = 0.0;

    static Gate h(int q) { return {GateKind::H, {q, q}, 0.0}; }
    static Gate rz(int q, double theta) { return {GateKind::RZ, {q, q}, theta}; }
    static Gate ry(int q, double theta) { return {GateKind::RY, {q, q}, theta}; }
    static Gate zz(int a, int b, double theta) { return {GateKind::ZZ, {a, b}, theta}; }
    static Gate cz(int a, int b) { return {GateKind::CZ, {a, b}, 0.0}; }

    /// Throws IndexError on out-of-range or coincident targets, ValueError on a non-finite angle.
    void validate(int n_qubits) const;

    friend bool operator==(const Gate &, const Gate &) = default;
};

struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;

    void append(const Gate &gate) { gates.push_back(gate); }
    void append(const Circuit &other);
    void validate() const;
};

/// Gates in reverse order with negated angles, so that inverse(c) undoes c.
[[nodiscard]] Circuit inverse(const Circuit &circuit);

[[nodiscard]] Statevector zero_state(int n_qubits, int max_qubits = kMaxQubits);

void apply_gate(Statevector &state, const Gate &gate);

/// Throws DimensionError if the circuit width differs from the state's.
void run_circuit(Statevector &state, const Circuit &circuit);

/// <a|b> = sum_k conj(a_k) b_k.
[[nodiscard]] cplx inner_product(const Statevector &a, const Statevector &b);

[[nodiscard]] double pauli_expectation(const Statevector &state, Pauli pauli, int qubit);

}  // namespace qfd
