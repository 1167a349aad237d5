#pragma once

// Subcommands of the command-line front end. Each command writes a JSON
// report to `out`, optionally mirrors it into <out_dir>/<command>.json and
// returns 0 when its success predicate holds, 1 otherwise. Errors propagate
// as phasync::Error; run_command turns them into a one-line code and exit 2.

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "phasync/io.hpp"
#include "phasync/phasync.hpp"

namespace phasync::cli {

using io::Json;

struct Options {
    std::string input;
    std::string pairing;  // "", "default" or "custom=<file>"
    std::optional<std::string> vecs;
    std::optional<std::string> transformation;
    std::optional<std::string> target;
    std::vector<double> p0, pdot0, q0, v0;
    double t_end = 5.0;
    double step = 1e-3;
    std::optional<std::string> out_dir;
};

namespace detail {

inline Json residual_json(const Residual& r, double threshold) {
    Json j;
    j["raw"] = io::number_json(r.raw);
    j["scale"] = io::number_json(r.scale);
    j["scaled"] = io::number_json(r.scaled());
    j["pass"] = r.raw <= threshold * r.scale;
    return j;
}

inline Json residual_pair_json(const std::optional<std::array<Residual, 2>>& r, double threshold) {
    if (!r) return nullptr;
    return Json::array({residual_json((*r)[0], threshold), residual_json((*r)[1], threshold)});
}

inline Json sode_json(const ImplicitSode& s) {
    Json j;
    j["regular"] = s.regular;
    j["rank_A2"] = s.rank_A2;
    j["A2"] = io::matrix_json(s.A2);
    j["A1"] = io::matrix_json(s.A1);
    j["A0"] = io::matrix_json(s.A0);
    return j;
}

inline Json complex_diag_json(const CVector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(io::complex_json(v(i)));
    return out;
}

inline void emit(const Json& report, const char* name, const Options& opt, std::ostream& out) {
    const std::string text = io::render(report);
    out << text;
    if (opt.out_dir) {
        std::filesystem::create_directories(*opt.out_dir);
        io::write_file((std::filesystem::path(*opt.out_dir) / (std::string(name) + ".json")).string(),
                       text);
    }
}

inline io::ProblemFile load_problem(const Options& opt) {
    return io::parse_problem(io::read_file(opt.input), opt.input);
}

inline const std::string& required(const std::optional<std::string>& path, const char* flag) {
    if (!path) fail(ErrorCode::InvalidArgument, std::string("missing required option ") + flag);
    return *path;
}

inline Vector vector_or(const std::vector<double>& v, Index n, double fill, const char* flag) {
    if (v.empty()) return Vector::Constant(n, fill);
    if (static_cast<Index>(v.size()) != n) {
        fail(ErrorCode::InvalidArgument, std::string(flag) + " needs " + std::to_string(n) +
                                             " values, got " + std::to_string(v.size()));
    }
    return Vector::Map(v.data(), n);
}

// Matches requested eigenvalues to spectrum indices.
inline Pairing resolve_pairing(const Spectrum& spectrum, const io::PairingOverride& req) {
    CustomPairing custom;
    for (std::size_t k = 0; k < req.lambda1.size(); ++k) {
        const Index a = nearest_eigenvalue(spectrum, req.lambda1[k]);
        const Index b = nearest_eigenvalue(spectrum, req.lambda2[k]);
        if (a < 0 || b < 0) {
            fail(ErrorCode::InvalidPairing,
                 "slot " + std::to_string(k) + " names a value that is not an eigenvalue");
        }
        custom.slots.push_back({a, b});
    }
    return pair_eigenvalues(spectrum, custom);
}

}  // namespace detail

inline Json compatibility_json(const CompatibilityReport& rep) {
    Json j;
    j["cc1_applicable"] = rep.cc1_applicable;
    j["sing_T2"] = rep.sing_T2;
    j["sing_T4"] = rep.sing_T4;
    j["threshold"] = io::number_json(rep.threshold);
    j["cc1"] = detail::residual_pair_json(rep.cc1, rep.threshold);
    j["id1"] = detail::residual_pair_json(rep.id1, rep.threshold);
    j["id2"] = detail::residual_pair_json(rep.id2, rep.threshold);
    j["verdict"] = to_string(rep.verdict);
    return j;
}

inline Json transformation_json(const Transformation& t) {
    Json j;
    j["n"] = t.n();
    j["T1"] = io::matrix_json(t.T1);
    j["T2"] = io::matrix_json(t.T2);
    j["T3"] = io::matrix_json(t.T3);
    j["T4"] = io::matrix_json(t.T4);
    j["sing_T2"] = t.sing_T2;
    j["sing_T4"] = t.sing_T4;
    j["cond_T2"] = io::number_json(t.cond_T2);
    j["cond_T4"] = io::number_json(t.cond_T4);
    return j;
}

inline Json target_json(const DecoupledSystem& d) {
    Json j;
    j["D"] = io::vector_json(d.d);
    j["B"] = io::vector_json(d.b);
    return j;
}

/// Success: every eigenpair meets the residual bound.
inline int cmd_spectrum(const Options& opt, std::ostream& out) {
    const auto problem = detail::load_problem(opt);
    const SodeSystem& sys = problem.system;
    const Spectrum spec = solve_qep(sys);
    bool ok = true;
    Json values = Json::array();
    for (Index j = 0; j < spec.size(); ++j) {
        const Complex l = spec.values(j);
        const CVector v = spec.vectors.col(j);
        const double raw = qep_residual(sys, l, v);
        const double bound = qep_residual_bound(sys, l, v);
        const double scale = bound / tol::qep;
        ok = ok && raw <= bound;
        Json e;
        e["index"] = j;
        e["value"] = io::complex_json(l);
        e["class"] = to_string(spec.tags[static_cast<std::size_t>(j)]);
        e["residual_raw"] = io::number_json(raw);
        e["residual_scaled"] = io::number_json(raw / scale);
        e["vector"] = io::complex_vector_json(v);
        values.push_back(std::move(e));
    }
    Json report;
    report["command"] = "spectrum";
    report["n"] = sys.n();
    report["eigenvalues"] = std::move(values);
    report["all_within_bound"] = ok;
    detail::emit(report, "spectrum", opt, out);
    return ok ? 0 : 1;
}

/// Success: verdict Compatible.
inline int cmd_decouple(const Options& opt, std::ostream& out) {
    const auto problem = detail::load_problem(opt);
    const SodeSystem& sys = problem.system;
    const Index n = sys.n();
    const Spectrum spec = solve_qep(sys);

    std::optional<io::PairingOverride> request = problem.pairing;
    if (opt.pairing == "default") {
        request.reset();
    } else if (opt.pairing.rfind("custom=", 0) == 0) {
        const std::string path = opt.pairing.substr(7);
        request = io::parse_pairing_text(io::read_file(path), n, path);
    } else if (!opt.pairing.empty()) {
        fail(ErrorCode::InvalidArgument, "--pairing expects 'default' or 'custom=<file>'");
    }
    const Pairing pairing = request ? detail::resolve_pairing(spec, *request)
                                    : pair_eigenvalues(spec, DefaultPairing{});

    EigvecMatrices vecs = opt.vecs ? io::parse_vecs_text(io::read_file(*opt.vecs), n, *opt.vecs)
                          : problem.vecs ? *problem.vecs
                                         : eigvecs_for(spec, pairing);

    const DecoupledSystem target = decoupled_from_pairing(pairing);
    const Transformation t = build_transformation(sys, pairing, vecs);
    const CompatibilityReport rep = check_compatibility(sys, t, target);

    Json induced;
    induced["from_transformation"] = detail::sode_json(sode_from_transformation(t));
    induced["transformed"] = detail::sode_json(transformed_sode(sys, t));
    try {
        const ImplicitSode joint = joint_sode(sys, t);
        Json j;
        j["D"] = io::matrix_json(joint.A1);
        j["B"] = io::matrix_json(joint.A0);
        induced["joint"] = std::move(j);
    } catch (const Error&) {
        induced["joint"] = nullptr;
    }

    Json report;
    report["command"] = "decouple";
    report["n"] = n;
    Json pj;
    pj["lambda1"] = detail::complex_diag_json(pairing.lambda1);
    pj["lambda2"] = detail::complex_diag_json(pairing.lambda2);
    report["pairing"] = std::move(pj);
    Json vj;
    vj["V1"] = io::complex_matrix_json(vecs.V1);
    vj["V2"] = io::complex_matrix_json(vecs.V2);
    report["vecs"] = std::move(vj);
    report["target"] = target_json(target);
    report["transformation"] = transformation_json(t);
    report["compatibility"] = compatibility_json(rep);
    report["induced"] = std::move(induced);
    report["verdict"] = to_string(rep.verdict);
    detail::emit(report, "decouple", opt, out);
    if (opt.out_dir) {
        const std::filesystem::path dir(*opt.out_dir);
        io::write_file((dir / "transformation.json").string(),
                       io::render(transformation_json(t)));
        io::write_file((dir / "target.json").string(), io::render(target_json(target)));
    }
    return rep.verdict == Verdict::Compatible ? 0 : 1;
}

/// Success: verdict Compatible.
inline int cmd_check(const Options& opt, std::ostream& out) {
    const auto problem = detail::load_problem(opt);
    const SodeSystem& sys = problem.system;
    const std::string& tpath = detail::required(opt.transformation, "--transformation");
    const std::string& dpath = detail::required(opt.target, "--target");
    const Transformation t = io::parse_transformation(io::read_file(tpath), tpath);
    const DecoupledSystem target = io::parse_target(io::read_file(dpath), sys.n(), dpath);
    const CompatibilityReport rep = check_compatibility(sys, t, target);

    Json report;
    report["command"] = "check";
    report["n"] = sys.n();
    report["compatibility"] = compatibility_json(rep);
    report["verdict"] = to_string(rep.verdict);
    detail::emit(report, "check", opt, out);
    return rep.verdict == Verdict::Compatible ? 0 : 1;
}

inline void write_trajectory_csv(const std::string& path, const RoundTrip& rt, Index n) {
    std::string text = "t";
    for (const char* group : {"p", "pdot", "q_mapped", "qdot_mapped", "q_direct", "qdot_direct"}) {
        for (Index i = 1; i <= n; ++i) text += "," + std::string(group) + std::to_string(i);
    }
    text += "\n";
    for (std::size_t k = 0; k < rt.decoupled.size(); ++k) {
        text += io::format_number(rt.decoupled.times[k]);
        for (const Trajectory* tr : {&rt.decoupled, &rt.mapped, &rt.direct}) {
            const Vector& x = tr->states[k];
            for (Index i = 0; i < x.size(); ++i) text += "," + io::format_number(x(i));
        }
        text += "\n";
    }
    io::write_file(path, text);
}

/// Success: round-trip deviation <= 1e-6 * (1 + max state norm).
inline int cmd_simulate(const Options& opt, std::ostream& out) {
    const auto problem = detail::load_problem(opt);
    const SodeSystem& sys = problem.system;
    const Index n = sys.n();
    const std::string& tpath = detail::required(opt.transformation, "--transformation");
    const std::string& dpath = detail::required(opt.target, "--target");
    const Transformation t = io::parse_transformation(io::read_file(tpath), tpath);
    const DecoupledSystem target = io::parse_target(io::read_file(dpath), n, dpath);
    if (t.n() != n) fail(ErrorCode::InvalidArgument, "transformation size differs from system");

    Vector p0, pdot0;
    if (!opt.q0.empty() || !opt.v0.empty()) {
        if (!opt.p0.empty() || !opt.pdot0.empty()) {
            fail(ErrorCode::InvalidArgument, "give either --q0/--v0 or --p0/--pdot0");
        }
        const Vector q0 = detail::vector_or(opt.q0, n, 0.0, "--q0");
        const Vector v0 = detail::vector_or(opt.v0, n, 0.0, "--v0");
        std::tie(p0, pdot0) = map_state(invert_transformation(t), q0, v0);
    } else {
        p0 = detail::vector_or(opt.p0, n, 1.0, "--p0");
        pdot0 = detail::vector_or(opt.pdot0, n, 0.0, "--pdot0");
    }

    const RoundTrip rt = roundtrip(sys, t, target, p0, pdot0, opt.t_end, opt.step);
    double max_norm = 0.0;
    for (const Trajectory* tr : {&rt.decoupled, &rt.mapped, &rt.direct})
        for (const auto& x : tr->states) max_norm = std::max(max_norm, x.norm());
    const double allowed = 1e-6 * (1.0 + max_norm);
    const bool ok = rt.max_deviation <= allowed;

    const std::filesystem::path dir(opt.out_dir.value_or("."));
    std::filesystem::create_directories(dir);
    const std::string csv = (dir / "trajectory.csv").string();
    write_trajectory_csv(csv, rt, n);

    Json report;
    report["command"] = "simulate";
    report["n"] = n;
    report["t_end"] = io::number_json(opt.t_end);
    report["step"] = io::number_json(rt.decoupled.step);
    report["steps"] = rt.decoupled.size() - 1;
    report["p0"] = io::vector_json(p0);
    report["pdot0"] = io::vector_json(pdot0);
    report["max_deviation"] = io::number_json(rt.max_deviation);
    report["max_state_norm"] = io::number_json(max_norm);
    report["allowed_deviation"] = io::number_json(allowed);
    report["trajectory"] = csv;
    report["passed"] = ok;
    detail::emit(report, "simulate", opt, out);
    return ok ? 0 : 1;
}

/// Always succeeds once the report is produced; inapplicability is a result.
inline int cmd_modal(const Options& opt, std::ostream& out) {
    const auto problem = detail::load_problem(opt);
    const SodeSystem& sys = problem.system;
    const LinearInvariants inv = linear_invariants(sys);
    const ModalDecision decision = modal_analysis_applicable(sys);

    Json ij;
    ij["phi"] = io::matrix_json(inv.phi);
    ij["del_phi"] = io::matrix_json(inv.del_phi);
    ij["tension"] = io::matrix_json(inv.tension);
    ij["commutator_norm"] = io::number_json(2.0 * inv.del_phi.norm());
    ij["phi_eigen_class"] = to_string(inv.phi_eigen_class);
    ij["tension_real_diagonalizable"] = inv.tension_real_diagonalizable;

    Json dj;
    dj["applicable"] = decision.applicable;
    dj["reason"] = to_string(decision.reason);
    if (decision.point_transform) {
        dj["P"] = io::matrix_json(*decision.point_transform);
        dj["diagonalization_residual"] =
            io::number_json(simultaneous_diagonalization_residual(sys, *decision.point_transform));
    } else {
        dj["P"] = nullptr;
        dj["diagonalization_residual"] = nullptr;
    }

    Json report;
    report["command"] = "modal";
    report["n"] = sys.n();
    report["invariants"] = std::move(ij);
    report["decision"] = std::move(dj);
    detail::emit(report, "modal", opt, out);
    return 0;
}

using Command = std::function<int(const Options&, std::ostream&)>;

/// Runs a command; errors become "error: <Code>: <message>" on `err`, exit 2.
inline int run_command(const Command& cmd, const Options& opt, std::ostream& out,
                       std::ostream& err) {
    try {
        return cmd(opt, out);
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << to_string(ErrorCode::InvalidArgument) << ": " << e.what() << "\n";
    }
    return 2;
}

}  // namespace phasync::cli
