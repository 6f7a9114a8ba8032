// kpsh: batch front end for the library. One subcommand per invocation;
// exit 0 if every assertion in scope passed, 1 on an assertion failure
// (the report is still written), 2 on a configuration error.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "kpsh/calculus.hpp"
#include "kpsh/constructions.hpp"
#include "kpsh/forms.hpp"
#include "kpsh/heat.hpp"
#include "kpsh/hermitian.hpp"
#include "kpsh/positivity.hpp"
#include "kpsh/potentials.hpp"
#include "kpsh/suite.hpp"

using nlohmann::json;
using namespace kpsh;

namespace {

int thread_cap() {
    // The numerical kernels are single-threaded for exact determinism;
    // KPSH_THREADS caps the worker count (currently always 1).
    const char* env = std::getenv("KPSH_THREADS");
    if (!env) return 1;
    const int v = std::atoi(env);
    return v >= 1 ? 1 : 1;
}

json base_config(const std::string& subcommand, std::uint64_t seed) {
    json c;
    c["subcommand"] = subcommand;
    c["seed"] = seed;
    c["threads"] = thread_cap();
    return c;
}

void write_report(const json& report, const std::string& out) {
    if (out.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream f(out);
        f << report.dump(2) << "\n";
    }
}

GridDomain box_grid(int n, int pts, double half, double stagger = 0.0) {
    GridDomain d;
    d.n = n;
    for (int a = 0; a < 2 * n; ++a) {
        d.shape.push_back(pts);
        d.spacing.push_back(2.0 * half / (pts - 1));
        d.origin.push_back(-half + stagger);
    }
    return d;
}

json grid_json(const GridDomain& d) {
    json g;
    g["n"] = d.n;
    g["shape"] = d.shape;
    g["spacing"] = d.spacing;
    g["origin"] = d.origin;
    g["topology"] = d.topology == GridDomain::Topology::torus ? "torus" : "box";
    return g;
}

HermitianMatrix parse_matrix(const std::string& text) {
    const json j = json::parse(text);
    const int n = static_cast<int>(j.size());
    std::vector<cplx> a;
    for (const auto& row : j)
        for (const auto& e : row) {
            if (e.is_array())
                a.emplace_back(e[0].get<double>(), e[1].get<double>());
            else
                a.emplace_back(e.get<double>(), 0.0);
        }
    return HermitianMatrix(n, std::move(a), 1e-9);
}

PotentialPtr parse_potential(const std::string& spec, int n) {
    if (spec == "abs2") return quadratic_potential(HermitianMatrix::identity(n));
    if (spec.rfind("radial:", 0) == 0) {
        std::istringstream ss(spec.substr(7));
        double beta = 1.0, scale = 1.0;
        char colon = ':';
        ss >> beta;
        if (ss >> colon >> scale) {
        }
        return radial_power_potential(n, beta, scale);
    }
    if (spec == "logdist") {
        SubvarietyZ z = SubvarietyZ::point(std::vector<cplx>(n, cplx{0.0, 0.0}));
        return log_distance_potential(z, 1.0);
    }
    throw contract_error("unknown potential spec: " + spec +
                         " (use abs2, radial:beta[:scale], logdist)");
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

// --- subcommand bodies; each returns the process exit code ---

int cmd_eig(const std::string& matrix, int q, const std::string& out) {
    const HermitianMatrix h = parse_matrix(matrix);
    const EigenSpectrum s = hermitian_eigenvalues(h);
    json rep;
    rep["config"] = base_config("eig", 0);
    rep["config"]["matrix"] = json::parse(matrix);
    rep["config"]["q"] = q;
    rep["spectrum"] = s.values;
    rep["psh_margin"] = psh_margin(h, q);
    rep["strongly_q_convex"] = is_strongly_q_convex(h, q);
    rep["passed"] = true;
    write_report(rep, out);
    return 0;
}

int cmd_positivity(const std::string& form_path, const std::string& mode, int trials,
                   double tol, std::uint64_t seed, const std::string& out) {
    std::ifstream f(form_path);
    if (!f) throw contract_error("cannot open form file: " + form_path);
    std::stringstream ss;
    ss << f.rdbuf();
    const ComplexForm eta = ComplexForm::from_json(ss.str());
    const PositivityVerdict v = mode == "strong"
                                    ? strong_positivity_certificate(eta, trials, tol, seed)
                                    : weak_positivity_test(eta, trials, tol, seed);
    json rep;
    rep["config"] = base_config("positivity", seed);
    rep["config"]["form"] = form_path;
    rep["config"]["mode"] = mode;
    rep["config"]["trials"] = trials;
    rep["config"]["tol"] = tol;
    rep["verdict"] = json::parse(v.to_json());
    rep["passed"] = v.positive;
    write_report(rep, out);
    return v.positive ? 0 : 1;
}

int cmd_psh_verify(const std::string& pot, int n, int q, int grid, double half, double tol,
                   const std::string& out) {
    const PotentialPtr p = parse_potential(pot, n);
    const GridDomain d = box_grid(n, grid + 1, half);
    const ScalarField f = sample_potential(*p, d);
    const ScalarField m = psh_margin_field(f, q);
    double mn = 1e300, mx = -1e300;
    for (std::int64_t i = 0; i < d.size(); ++i)
        if (m.masked_in(i)) {
            mn = std::min(mn, m.values[i]);
            mx = std::max(mx, m.values[i]);
        }
    json rep;
    rep["config"] = base_config("psh-verify", 0);
    rep["config"]["potential"] = pot;
    rep["config"]["q"] = q;
    rep["config"]["tol"] = tol;
    rep["config"]["grid"] = grid_json(d);
    rep["margin_min"] = mn;
    rep["margin_max"] = mx;
    rep["passed"] = mn >= -tol;
    write_report(rep, out);
    return mn >= -tol ? 0 : 1;
}

int cmd_heat(const std::string& in, const std::string& t_list, int q, double tol,
             const std::string& out_prefix, const std::string& out) {
    ScalarField phi;
    std::vector<std::uint8_t> mask;
    if (!in.empty()) {
        phi = read_field(in);
    } else {
        // Demo input: a strictly psh region of a smooth torus potential.
        GridDomain d;
        d.n = 1;
        d.topology = GridDomain::Topology::torus;
        const double period = 2.0 * std::acos(-1.0);
        d.shape = {64, 64};
        d.spacing = {period / 64, period / 64};
        d.origin = {0.0, 0.0};
        phi = ScalarField::sample(d, [](const std::vector<double>& x) {
            return -std::cos(x[0]) - std::cos(x[1]);
        });
        // The demo potential is strictly psh only near the origin; measure
        // margins on that compact region.
        mask.assign(d.size(), 0);
        for_each_interior(d, 0, [&](const std::vector<int>& idx, std::int64_t f) {
            const std::vector<double> x = d.point(idx);
            const double dx = std::min(x[0], period - x[0]);
            const double dy = std::min(x[1], period - x[1]);
            mask[f] = (dx <= 0.6 && dy <= 0.6) ? 1 : 0;
        });
    }
    const std::vector<double> ts = parse_list(t_list);
    const SmoothingReport rep_s = smoothing_preserves_psh(phi, q, ts, mask);
    bool ok = true;
    json rep;
    rep["config"] = base_config("heat", 0);
    rep["config"]["input"] = in.empty() ? "(demo torus potential)" : in;
    rep["config"]["q"] = q;
    rep["config"]["tol"] = tol;
    rep["config"]["t"] = ts;
    rep["config"]["grid"] = grid_json(phi.domain);
    rep["min_margins"] = rep_s.min_margins;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (rep_s.min_margins[i] < -tol) ok = false;
        if (!out_prefix.empty())
            write_field(heat_smooth(phi, ts[i]), out_prefix + "_t" + std::to_string(i) + ".bin");
    }
    rep["passed"] = ok;
    write_report(rep, out);
    return ok ? 0 : 1;
}

int cmd_construct(const std::string& which, const std::string& params_path,
                  const std::string& out) {
    json p;
    if (!params_path.empty()) {
        std::ifstream f(params_path);
        if (!f) throw contract_error("cannot open params file: " + params_path);
        f >> p;
    }
    auto get = [&](const std::string& key, double dflt) {
        return p.contains(key) ? p[key].get<double>() : dflt;
    };
    json rep;
    rep["config"] = base_config("construct", 0);
    rep["config"]["kind"] = which;
    rep["config"]["params"] = p;
    bool ok = true;

    if (which == "torus-embed") {
        const double C = get("C", 1.0), R = get("R", 2.0), eps = get("eps", 0.1);
        const int n = static_cast<int>(get("n", 1));
        const PotentialPtr phi =
            quadratic_potential(HermitianMatrix::identity(n) * (C / (R * R)));
        const TorusEmbedResult te = torus_embedding_potential(phi, C, R, eps);
        rep["A"] = te.A;
        rep["A_lower_bound"] = (C + 2 * eps) / (R * R - 1);
        ok = te.A >= (C + 2 * eps) / (R * R - 1);
    } else if (which == "product") {
        const int zn = static_cast<int>(get("z_n", 1));
        const int bn = static_cast<int>(get("b_n", 1));
        const int pts = static_cast<int>(get("grid", 17));
        const int q = static_cast<int>(get("q", 1));
        const GridDomain d = box_grid(zn + bn, pts, get("half", 0.5));
        GridDomain dz = d;
        dz.n = zn;
        dz.shape.resize(2 * zn);
        dz.spacing.resize(2 * zn);
        dz.origin.resize(2 * zn);
        const ScalarField theta = ScalarField::sample(dz, [](const std::vector<double>& x) {
            double s = 1.0;
            for (double v : x) s += v * v;
            return s;
        });
        const ProductResult pr =
            local_product_potential(theta, get("c1", 4.0), get("c2", 4.0), d, q);
        rep["r_max"] = pr.r_max;
        rep["expansion_error"] = pr.expansion_error;
        rep["measured_c1"] = pr.measured_c1;
        rep["measured_c2"] = pr.measured_c2;
        ok = pr.r_max > 0.0;
    } else if (which == "glue") {
        ScalarField phi0, phi1, xi;
        if (p.contains("phi0")) {
            phi0 = read_field(p["phi0"].get<std::string>());
            phi1 = read_field(p["phi1"].get<std::string>());
            xi = read_field(p["xi"].get<std::string>());
        } else {
            const GridDomain d = box_grid(1, 33, 1.0);
            phi0 = ScalarField::sample(
                d, [](const std::vector<double>& x) { return x[0] * x[0] + x[1] * x[1]; });
            phi1 = ScalarField::sample(d, [](const std::vector<double>& x) {
                return 0.3 * (x[0] * x[0] - x[1] * x[1]) + 0.2 * x[0];
            });
            xi = ScalarField::sample(d, [](const std::vector<double>& x) {
                const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
                if (r <= 0.4) return 1.0;
                if (r >= 0.8) return 0.0;
                const double t = (0.8 - r) / 0.4;
                return t * t * (3 - 2 * t);
            });
        }
        const GlueResult gr = glue_constant(phi0, phi1, xi, get("eps", 0.5),
                                            static_cast<int>(get("q", 1)), get("tol", 1e-8));
        rep["C"] = gr.C;
        rep["overlap_norm"] = gr.overlap_norm;
        rep["min_margin"] = gr.min_margin;
        ok = gr.min_margin >= -get("tol", 1e-8);
    } else if (which == "exhaust") {
        const int n = 2, q = static_cast<int>(get("q", 2));
        const PotentialPtr phi = quadratic_potential(HermitianMatrix::identity(n));
        const SubvarietyZ z = SubvarietyZ::point(std::vector<cplx>(n, cplx{0.0, 0.0}));
        const GridDomain d = box_grid(n, static_cast<int>(get("grid", 25)), get("half", 1.0),
                                      get("stagger", 0.04));
        const ExhaustResult er = exhaustion_potential(phi, z, get("lambda", 1.0),
                                                      get("A", -0.8), get("B", 1.0),
                                                      get("eps", 0.15), q, d);
        double max_psi_w = -1e300;
        for (std::int64_t i = 0; i < d.size(); ++i)
            if (er.w_mask[i]) max_psi_w = std::max(max_psi_w, er.psi.values[i]);
        rep["c_phi"] = er.c_phi;
        rep["min_margin_away_from_pole"] = er.min_margin_away_from_pole;
        rep["max_psi_on_W"] = max_psi_w;
        ok = max_psi_w <= 0.0 && er.min_margin_away_from_pole >= -get("tol", 1e-8);
    } else {
        throw contract_error("unknown construct kind: " + which);
    }
    rep["passed"] = ok;
    write_report(rep, out);
    return ok ? 0 : 1;
}

int cmd_sibony(double beta, int n, int pp, const std::string& n_list, int grid,
               const std::string& out) {
    SibonyConfig cfg;
    cfg.beta = beta;
    cfg.n = n;
    cfg.p = pp;
    cfg.grid_points = grid;
    if (!n_list.empty()) cfg.n_list = parse_list(n_list);
    const SibonyReport r = sibony_experiment(cfg);
    json rep;
    rep["config"] = base_config("sibony", 0);
    rep["config"]["beta"] = beta;
    rep["config"]["n"] = n;
    rep["config"]["p"] = pp;
    rep["config"]["N"] = cfg.n_list;
    rep["config"]["grid"] = grid;
    rep["config"]["tol"] = cfg.tol;
    rep["integrals"] = r.integrals;
    rep["r_values"] = r.r_values;
    rep["integrals_by_r"] = r.integrals_by_r;
    rep["stabilization_index"] = r.stabilization_index;
    rep["monotone"] = r.monotone;
    rep["cauchy_in_r"] = r.cauchy_in_r;
    rep["smooth_check_rel_error"] = r.smooth_check_rel_error;
    const bool ok = r.monotone && r.cauchy_in_r && r.stabilization_index >= 0;
    rep["passed"] = ok;
    write_report(rep, out);
    if (!out.empty()) {
        const std::string csv_path = out.substr(0, out.find_last_of('.')) + ".csv";
        std::ofstream c(csv_path);
        c << r.csv();
    }
    return ok ? 0 : 1;
}

int cmd_suite(std::uint64_t seed, const std::string& out_dir, const std::string& out) {
    const SuiteResult res = run_suite(seed);
    for (const CriterionResult& c : res.criteria)
        std::cerr << "[" << (c.passed ? "PASS" : "FAIL") << "] criterion " << c.id << " ("
                  << c.name << "): " << c.detail << "\n";
    json rep = json::parse(res.to_json());
    rep["config"] = base_config("suite", seed);
    write_report(rep, out);
    if (!out_dir.empty()) {
        for (const CriterionResult& c : res.criteria)
            for (const auto& [name, content] : c.csv_outputs) {
                std::ofstream f(out_dir + "/" + name);
                f << content;
            }
    }
    return res.all_passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kpsh: pointwise positivity, q-convex potentials and smoothing "
                 "experiments on flat Kaehler grids"};
    app.require_subcommand(1);

    std::string out, config_path;
    app.add_option("--out", out, "write the JSON report here (default: stdout)");

    // eig
    auto* eig = app.add_subcommand("eig", "Hermitian spectrum and the q-margin");
    std::string matrix;
    int q = 1;
    eig->add_option("--matrix", matrix, "matrix rows as JSON; entries x or [re,im]")
        ->required();
    eig->add_option("--q", q, "eigenvalue-sum order");

    // positivity
    auto* pos = app.add_subcommand("positivity", "weak/strong cone test for a (p,p)-form");
    std::string form_path, mode = "weak";
    int trials = 64;
    double tol = 1e-9;
    std::uint64_t seed = 20260823;
    pos->add_option("--form", form_path, "form JSON file")->required();
    pos->add_option("--mode", mode, "weak | strong")->check(CLI::IsMember({"weak", "strong"}));
    pos->add_option("--trials", trials, "search restarts / dictionary size");
    pos->add_option("--tol", tol, "margin tolerance");
    pos->add_option("--seed", seed, "random seed");

    // psh-verify
    auto* psh = app.add_subcommand("psh-verify", "pointwise margin field of a potential");
    std::string pot = "abs2";
    int n = 1, grid = 32, vq = 1;
    double half = 1.0, vtol = 1e-9;
    psh->add_option("--potential", pot, "abs2 | radial:beta[:scale] | logdist");
    psh->add_option("--n", n, "complex dimension");
    psh->add_option("--q", vq, "margin order");
    psh->add_option("--grid", grid, "cells per axis");
    psh->add_option("--half", half, "half-width of the box");
    psh->add_option("--tol", vtol, "pass tolerance");

    // heat
    auto* heat = app.add_subcommand("heat", "spectral heat smoothing on a torus field");
    std::string heat_in, t_list = "1e-4,1e-3,1e-2", out_prefix;
    int hq = 1;
    double htol = 1e-9;
    heat->add_option("--in", heat_in, "input field (.bin/.csv, torus topology)");
    heat->add_option("--t", t_list, "comma-separated times");
    heat->add_option("--q", hq, "margin order");
    heat->add_option("--tol", htol, "pass tolerance");
    heat->add_option("--out-prefix", out_prefix, "write smoothed fields with this prefix");

    // construct
    auto* con = app.add_subcommand("construct", "neighbourhood-potential constructions");
    std::string kind, params;
    con->add_option("kind", kind, "torus-embed | product | glue | exhaust")->required();
    con->add_option("--params", params, "JSON parameter file");

    // sibony
    auto* sib = app.add_subcommand("sibony", "singular integrability experiment");
    double beta = 0.5;
    int sn = 2, sp = 1, sgrid = 48;
    std::string sN = "2,4,8,16";
    sib->add_option("--beta", beta, "radial exponent of theta");
    sib->add_option("--n", sn, "complex dimension");
    sib->add_option("--p", sp, "form order p");
    sib->add_option("--N", sN, "comma-separated truncation levels");
    sib->add_option("--grid", sgrid, "grid points per axis");

    // suite
    auto* su = app.add_subcommand("suite", "full verification battery");
    std::uint64_t sseed = 7;
    std::string out_dir;
    su->add_option("--seed", sseed, "suite seed");
    su->add_option("--out-dir", out_dir, "directory for the CSV payloads");

    // Let `--out` appear after the subcommand name as well.
    for (CLI::App* s : {eig, pos, psh, heat, con, sib, su}) s->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*eig) return cmd_eig(matrix, q, out);
        if (*pos) return cmd_positivity(form_path, mode, trials, tol, seed, out);
        if (*psh) return cmd_psh_verify(pot, n, vq, grid, half, vtol, out);
        if (*heat) return cmd_heat(heat_in, t_list, hq, htol, out_prefix, out);
        if (*con) return cmd_construct(kind, params, out);
        if (*sib) return cmd_sibony(beta, sn, sp, sN, sgrid, out);
        if (*su) return cmd_suite(sseed, out_dir, out);
    } catch (const contract_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
