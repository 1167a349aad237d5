#pragma once

// Fixed-step RK4 integration of q'' + C q' + K q = 0 and the trajectory-level
// check that the state map carries decoupled solutions onto solutions of the
// original system.

#include <cmath>
#include <utility>
#include <vector>

#include "phasync/compat.hpp"

namespace phasync {

/// States are [q; q'] (or [p; p']) sampled on a uniform grid from t = 0.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    double step = 0.0;

    std::size_t size() const { return times.size(); }
};

namespace detail {

// Grid of N = ceil(t_end / h) equal steps ending exactly at t_end.
inline Index step_count(double t_end, double h) {
    if (!(h > 0.0) || !(t_end > 0.0) || !std::isfinite(h) || !std::isfinite(t_end)) {
        fail(ErrorCode::InvalidArgument, "integration needs finite t_end > 0 and h > 0");
    }
    const double ratio = t_end / h;
    return std::max<Index>(1, static_cast<Index>(std::ceil(ratio - 1e-9 * ratio)));
}

}  // namespace detail

/// Classical fourth-order Runge-Kutta on (q, v)' = (v, -C v - K q).
inline Trajectory integrate(const Matrix& C, const Matrix& K, const Vector& q0, const Vector& v0,
                            double t_end, double h) {
    const Index n = C.rows();
    if (C.cols() != n || K.rows() != n || K.cols() != n || q0.size() != n || v0.size() != n) {
        fail(ErrorCode::InvalidArgument, "inconsistent dimensions for integrate");
    }
    if (!all_finite(C) || !all_finite(K) || !all_finite(q0) || !all_finite(v0)) {
        fail(ErrorCode::NonFinite, "integrate inputs must be finite");
    }
    const Index steps = detail::step_count(t_end, h);
    const double dt = t_end / static_cast<double>(steps);

    Matrix A = Matrix::Zero(2 * n, 2 * n);
    A.topRightCorner(n, n) = identity(n);
    A.bottomLeftCorner(n, n) = -K;
    A.bottomRightCorner(n, n) = -C;

    Trajectory traj;
    traj.step = dt;
    traj.times.reserve(static_cast<std::size_t>(steps + 1));
    traj.states.reserve(static_cast<std::size_t>(steps + 1));
    Vector x(2 * n);
    x << q0, v0;
    traj.times.push_back(0.0);
    traj.states.push_back(x);
    for (Index i = 1; i <= steps; ++i) {
        const Vector k1 = A * x;
        const Vector k2 = A * (x + 0.5 * dt * k1);
        const Vector k3 = A * (x + 0.5 * dt * k2);
        const Vector k4 = A * (x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!all_finite(x) || x.cwiseAbs().maxCoeff() > tol::blowup) {
            fail(ErrorCode::NonFinite, "state blew up at step " + std::to_string(i));
        }
        traj.times.push_back(static_cast<double>(i) * dt);
        traj.states.push_back(x);
    }
    return traj;
}

/// q = T1 p + T2 p', q' = T3 p + T4 p'.
inline std::pair<Vector, Vector> map_state(const Transformation& t, const Vector& p,
                                           const Vector& pdot) {
    return {t.T1 * p + t.T2 * pdot, t.T3 * p + t.T4 * pdot};
}

/// Both legs of the round trip plus their pointwise deviation.
struct RoundTrip {
    Trajectory decoupled;  // [p; p']
    Trajectory mapped;     // decoupled states pushed through the state map
    Trajectory direct;     // original system integrated from the mapped start
    double max_deviation = 0.0;
};

inline RoundTrip roundtrip(const SodeSystem& sys, const Transformation& t,
                           const DecoupledSystem& target, const Vector& p0, const Vector& pdot0,
                           double t_end, double h) {
    const CompatibilityReport rep = check_compatibility(sys, t, target);
    if (rep.verdict != Verdict::Compatible) {
        fail(ErrorCode::Incompatible, "transformation is not compatible with the target system");
    }
    const Index n = sys.n();
    RoundTrip out;
    out.decoupled = integrate(target.D(), target.B(), p0, pdot0, t_end, h);
    const Matrix M = t.state_map();
    out.mapped.times = out.decoupled.times;
    out.mapped.step = out.decoupled.step;
    for (const auto& x : out.decoupled.states) out.mapped.states.push_back(M * x);

    const Vector& start = out.mapped.states.front();
    out.direct = integrate(sys.C(), sys.K(), start.head(n), start.tail(n), t_end, h);
    for (std::size_t i = 0; i < out.mapped.size(); ++i) {
        out.max_deviation =
            std::max(out.max_deviation, (out.mapped.states[i] - out.direct.states[i]).norm());
    }
    return out;
}

/// Maximum 2-norm deviation between mapped decoupled states and the directly
/// integrated original trajectory on the common grid.
inline double roundtrip_check(const SodeSystem& sys, const Transformation& t,
                              const DecoupledSystem& target, const Vector& p0,
                              const Vector& pdot0, double t_end, double h) {
    return roundtrip(sys, t, target, p0, pdot0, t_end, h).max_deviation;
}

/// ||Gamma_C(f(x)) - Tf(Gamma_D(x))|| at the state x = (p, p'): the original
/// vector field at the mapped state against the pushed-forward decoupled one.
inline double vector_field_mismatch(const SodeSystem& sys, const Transformation& t,
                                    const DecoupledSystem& target, const Vector& p,
                                    const Vector& pdot) {
    const auto [q, qdot] = map_state(t, p, pdot);
    const Index n = sys.n();
    Vector original(2 * n);
    original << qdot, -sys.C() * qdot - sys.K() * q;
    Vector decoupled(2 * n);
    decoupled << pdot, -target.D() * pdot - target.B() * p;
    return (original - t.state_map() * decoupled).norm();
}

}  // namespace phasync
