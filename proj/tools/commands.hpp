#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvosc/integrator.hpp"
#include "curvosc/model.hpp"
#include "curvosc/radial_solver.hpp"
#include "curvosc/spectrum.hpp"
#include "curvosc/trajectory.hpp"

#include "output.hpp"
#include "run_config.hpp"

namespace curvosc_cli {

using namespace curvosc;

inline ModelParams params_from(const RunConfig& c) { return make_params(c.lambda, c.alpha, c.k); }

inline ClassicalSetup setup_from(const RunConfig& c, const ModelParams& p) {
    if (c.E && c.C) throw std::invalid_argument("give either --E or --C, not both");
    if (!c.E && !c.C) throw std::invalid_argument("the classical sector needs --E or --C");
    return c.E ? setup_from_energy(p, c.J, *c.E, c.phi0, c.K)
               : setup_from_constant(p, c.J, *c.C, c.phi0, c.K);
}

inline void emit_record(const RunConfig& cfg, const Record& rec) {
    OutputTarget target(cfg.out);
    if (cfg.format == "json") {
        nlohmann::ordered_json j;
        for (const auto& [k, v] : rec.fields) {
            // numeric fields were formatted with %.17g; re-parse keeps JSON numeric
            char* end = nullptr;
            const double d = std::strtod(v.c_str(), &end);
            if (end && *end == '\0' && !v.empty())
                j[k] = d;
            else
                j[k] = v;
        }
        target.stream() << j.dump(2) << "\n";
    } else {
        write_kv(target.stream(), rec);
    }
}

// ---------------------------------------------------------------------------
// classify

inline int cmd_classify(const RunConfig& cfg) {
    const ModelParams p = params_from(cfg);
    const ClassicalSetup s = setup_from(cfg, p);
    const TrajectoryRegime reg = classify(s);
    const auto mn = v_eff_minimum(p, s.J);

    Record rec;
    rec.add("lambda", p.lambda);
    rec.add("alpha", p.alpha);
    rec.add("k", p.k);
    rec.add("J", s.J);
    rec.add("E", s.E);
    rec.add("C", s.C);
    rec.add("regime", to_string(reg.tag));
    if (reg.tag == RegimeTag::Bounded || reg.tag == RegimeTag::Unbounded)
        rec.add("omega", reg.omega);
    if (reg.tag != RegimeTag::Forbidden) {
        rec.add("A", reg.A);
        rec.add("B", reg.B);
    }
    if (mn) {
        rec.add("r_min", mn->r_min);
        rec.add("v_eff_min", mn->v_min);
    }
    rec.add("separatrix_energy", p.separatrix_energy());
    if (reg.monotone_potential)
        rec.add("note", "no interior potential minimum; classified against the asymptote");
    emit_record(cfg, rec);
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

inline int cmd_simulate(const RunConfig& cfg) {
    const ModelParams p = params_from(cfg);
    const ClassicalSetup s = setup_from(cfg, p);
    ClosedFormTrajectory traj(s);  // rejects the forbidden regime

    const int n = std::max(1, cfg.samples);
    std::vector<double> times(n);
    for (int i = 0; i < n; ++i)
        times[i] = n == 1 ? cfg.t_start
                          : cfg.t_start + (cfg.t_end - cfg.t_start) * i / (n - 1);
    if (cfg.t_end == cfg.t_start) times.assign(1, cfg.t_start);

    const TrajectoryState st0 = traj.state_at(times.front());
    IntegratorConfig icfg;  // adaptive, rel_tol 1e-10
    const auto numeric = integrate(
        s, DynamicalState{times.front(), st0.r, st0.r_dot, st0.phi}, times, icfg);

    OutputTarget target(cfg.out);
    std::ostream& os = target.stream();
    double max_diff = 0.0;

    std::vector<std::array<double, 8>> rows(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        const TrajectoryState st = traj.state_at(t);
        const double r2c = traj.r_squared_at(t);
        const double r2n = numeric[i].state.r * numeric[i].state.r;
        const double drift =
            (numeric[i].energy - s.E) / std::max(1.0, std::abs(s.E));
        max_diff = std::max(max_diff, std::abs(r2c - r2n));
        rows[i] = {t, st.r, st.phi, st.r * std::cos(st.phi), st.r * std::sin(st.phi),
                   r2c, r2n, drift};
    }

    static const char* columns[8] = {"t",        "r",          "phi",        "x",
                                     "y",        "r2_closed",  "r2_numeric", "E_drift"};
    if (cfg.format == "json") {
        nlohmann::ordered_json j;
        j["columns"] = columns;
        auto& out_rows = j["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : rows)
            out_rows.push_back(std::vector<double>(row.begin(), row.end()));
        j["metadata"]["regime"] = to_string(traj.regime().tag);
        j["metadata"]["max_abs_r2_diff"] = max_diff;
        j["metadata"]["integrator_rel_tol"] = icfg.rel_tol;
        os << j.dump(2) << "\n";
    } else {
        for (int c = 0; c < 8; ++c) os << (c ? "," : "") << columns[c];
        os << "\n";
        for (const auto& row : rows) {
            for (int c = 0; c < 8; ++c) os << (c ? "," : "") << g17(row[c]);
            os << "\n";
        }
        os << "# regime=" << to_string(traj.regime().tag) << "\n";
        os << "# max_abs_r2_diff=" << g17(max_diff) << "\n";
        os << "# integrator_rel_tol=" << g17(icfg.rel_tol) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// spectrum

inline int cmd_spectrum(const RunConfig& cfg) {
    const ModelParams p = params_from(cfg);
    const auto levels = enumerate_bound_states(p, cfg.max_m, cfg.max_nr);
    const double bound = normalizability_bound(p);

    OutputTarget target(cfg.out);
    std::ostream& os = target.stream();
    if (cfg.format == "json") {
        nlohmann::ordered_json j;
        auto& rows = j["levels"] = nlohmann::ordered_json::array();
        for (const auto& lv : levels) {
            nlohmann::ordered_json r;
            r["n_r"] = lv.n_r;
            r["m"] = lv.m;
            r["mu"] = lv.mu;
            r["n"] = lv.n;
            r["energy"] = lv.energy;
            r["normalizable"] = lv.normalizable;
            rows.push_back(r);
        }
        j["metadata"]["count"] = levels.size();
        if (p.lambda > 0.0)
            j["metadata"]["normalizability_bound"] = bound;
        else
            j["metadata"]["normalizability_bound"] = "unbounded";
        os << j.dump(2) << "\n";
    } else {
        os << "n_r,m,mu,n,energy,normalizable\n";
        for (const auto& lv : levels)
            os << lv.n_r << "," << lv.m << "," << g17(lv.mu) << "," << g17(lv.n) << ","
               << g17(lv.energy) << "," << (lv.normalizable ? 1 : 0) << "\n";
        os << "# count=" << levels.size() << "\n";
        if (p.lambda > 0.0) {
            os << "# normalizability_bound=" << g17(bound) << "\n";
            if (levels.empty())
                os << "# note=no level satisfies n = 2 n_r + sqrt(m^2+k) < beta/lambda - 1/2\n";
        } else {
            os << "# normalizability_bound=unbounded\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// wavefunction

inline int cmd_wavefunction(const RunConfig& cfg) {
    const ModelParams p = params_from(cfg);
    const QuantumLevel lv = energy_level(p, cfg.nr, cfg.m);
    const RadialWavefunction wf = normalize(p, lv);

    double r_cap;
    if (p.lambda < 0.0)
        r_cap = (1.0 - 1e-9) / std::sqrt(-p.lambda);
    else
        r_cap = 4.0 * std::sqrt(detail::default_map_scale(p, lv.mu));

    const int n = std::max(2, cfg.samples);
    OutputTarget target(cfg.out);
    std::ostream& os = target.stream();
    if (cfg.format == "json") {
        nlohmann::ordered_json j;
        j["columns"] = std::vector<std::string>{"r", "R"};
        auto& rows = j["rows"] = nlohmann::ordered_json::array();
        for (int i = 1; i <= n; ++i) {
            const double r = r_cap * i / n;
            rows.push_back(std::vector<double>{r, wf.value(r)});
        }
        j["metadata"]["n_r"] = lv.n_r;
        j["metadata"]["m"] = lv.m;
        j["metadata"]["mu"] = lv.mu;
        j["metadata"]["n"] = lv.n;
        j["metadata"]["energy"] = lv.energy;
        j["metadata"]["norm"] = wf.norm;
        os << j.dump(2) << "\n";
    } else {
        os << "r,R\n";
        for (int i = 1; i <= n; ++i) {
            const double r = r_cap * i / n;
            os << g17(r) << "," << g17(wf.value(r)) << "\n";
        }
        os << "# n_r=" << lv.n_r << "\n# m=" << lv.m << "\n";
        os << "# mu=" << g17(lv.mu) << "\n# n=" << g17(lv.n) << "\n";
        os << "# energy=" << g17(lv.energy) << "\n# norm=" << g17(wf.norm) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
    std::string name;
    double measured;
    double tol;
    bool pass;
};

class CheckList {
public:
    // pass when |measured| <= tol
    void add(const std::string& name, double measured, double tol) {
        checks_.push_back({name, measured, tol, std::abs(measured) <= tol});
    }
    // pass when measured >= floor (for growth/inflation style checks)
    void add_at_least(const std::string& name, double measured, double floor) {
        checks_.push_back({name, measured, floor, measured >= floor});
    }
    int failures() const {
        int n = 0;
        for (const auto& c : checks_) n += c.pass ? 0 : 1;
        return n;
    }
    const std::vector<Check>& checks() const { return checks_; }

private:
    std::vector<Check> checks_;
};

namespace verify_detail {

inline void classical_checks(const ModelParams& p, CheckList& list) {
    for (double J : {0.0, 1.0}) {
        // without any barrier (J = 0, k = 0) bounded orbits pass through
        // the coordinate origin, where the radial ODE is singular
        if (J * J + p.k == 0.0) continue;
        const auto mn = v_eff_minimum(p, J);
        std::vector<std::pair<std::string, double>> runs;
        if (p.lambda > 0.0) {
            const double sep = p.separatrix_energy();
            if (mn && mn->v_min < sep) {
                runs.emplace_back("bounded", mn->v_min + 0.5 * (sep - mn->v_min));
                runs.emplace_back("limiting", sep);
            }
            runs.emplace_back("unbounded", 1.5 * sep);
        } else if (mn) {
            runs.emplace_back("bounded", mn->v_min + std::max(1.0, 0.5 * mn->v_min));
        }

        for (const auto& [tag, E] : runs) {
            const ClassicalSetup s = setup_from_energy(p, J, E, 0.4, 0.2);
            ClosedFormTrajectory traj(s);
            std::ostringstream id;
            id << "[" << tag << ",J=" << J << "]";

            const double t_hi =
                traj.regime().tag == RegimeTag::Bounded ? traj.period() : 5.0;
            std::vector<double> times(201);
            for (int i = 0; i <= 200; ++i) times[i] = t_hi * i / 200.0;

            const TrajectoryState st0 = traj.state_at(0.0);
            IntegratorConfig icfg;
            double ode_diff = 0.0;
            // r^2 grows without bound off the bounded regime, so those
            // legs compare relative to the local magnitude
            bool relative = traj.regime().tag != RegimeTag::Bounded;
            const auto samples =
                integrate(s, DynamicalState{0.0, st0.r, st0.r_dot, st0.phi}, times, icfg);
            for (std::size_t i = 0; i < times.size(); ++i) {
                const double r2c = traj.r_squared_at(times[i]);
                const double r2n = samples[i].state.r * samples[i].state.r;
                const double d = std::abs(r2c - r2n) / (relative ? std::max(1.0, r2c) : 1.0);
                ode_diff = std::max(ode_diff, d);
            }
            list.add("closed_vs_ode" + id.str(), ode_diff, 1e-6);

            double energy_err = 0.0;
            for (int i = 0; i < 1000; ++i) {
                const double t = t_hi * i / 999.0;
                const TrajectoryState st = traj.state_at(t);
                const double e = total_energy(p, J, st.r, st.r_dot);
                energy_err = std::max(energy_err, std::abs(e - E) / std::abs(E));
            }
            list.add("energy_identity" + id.str(), energy_err, 1e-10);

            if (traj.regime().tag == RegimeTag::Bounded) {
                const double lo = traj.regime().B - traj.regime().A;
                const double hi = traj.regime().B + traj.regime().A;
                const double e1 = effective_potential(p, J, std::sqrt(lo));
                const double e2 = effective_potential(p, J, std::sqrt(hi));
                list.add("turning_points" + id.str(),
                         std::max(std::abs(e1 - E), std::abs(e2 - E)) / std::abs(E), 1e-9);
            }

            if (J != 0.0) {
                double rate_err = 0.0;
                const double h = 1e-6;
                for (int i = 1; i < 100; ++i) {
                    const double t = t_hi * i / 100.0;
                    const double fd = (traj.phi_at(t + h) - traj.phi_at(t - h)) / (2.0 * h);
                    rate_err = std::max(rate_err,
                                        std::abs(fd - J / traj.r_squared_at(t)));
                }
                list.add("angle_rate" + id.str(), rate_err, 1e-6);
            } else {
                double dev = 0.0;
                for (int i = 0; i <= 50; ++i)
                    dev = std::max(dev, std::abs(traj.phi_at(t_hi * i / 50.0) - s.K));
                list.add("constant_angle" + id.str(), dev, 0.0);
            }
        }
    }
}

inline void quantum_checks(const ModelParams& p, int grid_points, double perturb,
                           CheckList& list) {
    const auto levels = enumerate_bound_states(p, 2, 2);

    // group by sector (levels of equal mu share one radial problem)
    std::map<double, std::vector<QuantumLevel>> sectors;
    for (const auto& lv : levels)
        if (lv.m >= 0) sectors[lv.mu].push_back(lv);

    for (auto& [mu, sector] : sectors) {
        std::sort(sector.begin(), sector.end(),
                  [](const QuantumLevel& a, const QuantumLevel& b) { return a.n_r < b.n_r; });
        const int count = static_cast<int>(sector.size());
        const auto sols = solve_eigenvalues(p, mu, count, GridSpec{grid_points, 0.0});
        for (int i = 0; i < count; ++i) {
            std::ostringstream id;
            id << "[mu=" << g17(mu) << ",n_r=" << sector[i].n_r << "]";
            list.add("matrix_energy" + id.str(),
                     (sols[i].eigenvalue - sector[i].energy) / sector[i].energy, 1e-4);
            const auto wf = normalize(p, sector[i]);
            list.add_at_least("oracle_overlap" + id.str(),
                              std::abs(grid_overlap(sols[i], wf)), 0.99999);
        }

        // shooting cross-check on the sector ground state
        const QuantumLevel& g = sector.front();
        const double half = 0.05 * std::max(1.0, std::abs(g.energy));
        std::ostringstream id;
        id << "[mu=" << g17(mu) << "]";
        list.add("shooting_defect" + id.str(), shooting_check(p, mu, g.energy), 1e-6);
        const double root = shooting_root_near(p, mu, g.energy, half);
        list.add("shooting_root" + id.str(), (root - g.energy) / g.energy, 1e-6);
    }

    // residuals on an interior grid (the perturbation hook shifts the
    // energy used here and must drive these checks to failure)
    for (const auto& lv : levels) {
        if (lv.m < 0) continue;
        QuantumLevel probe = lv;
        probe.energy += perturb;
        const double r_lo = p.lambda > 0.0 ? 0.2 : 0.05 / std::sqrt(-p.lambda);
        const double r_hi = p.lambda > 0.0 ? 3.0 : 0.95 / std::sqrt(-p.lambda);
        double worst = 0.0;
        for (int i = 0; i < 40; ++i) {
            const double r = r_lo + (r_hi - r_lo) * i / 39.0;
            worst = std::max(worst, std::abs(radial_residual(p, probe, r)));
        }
        std::ostringstream id;
        id << "[n_r=" << lv.n_r << ",m=" << lv.m << "]";
        list.add("radial_residual" + id.str(), worst, 1e-9);
    }

    if (p.lambda < 0.0) {
        // orthonormality of the lowest same-mu states
        const double mu0 = sectors.begin()->first;
        std::vector<RadialWavefunction> wfs;
        for (int nr = 0; nr < 3; ++nr)
            wfs.push_back(normalize(p, energy_level(p, nr, 0)));
        double dev = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double g = wfs[i].norm * wfs[j].norm *
                                 measure_inner_product(p, wfs[i].level, wfs[j].level);
                dev = std::max(dev, std::abs(g - (i == j ? 1.0 : 0.0)));
            }
        std::ostringstream id;
        id << "[mu=" << g17(mu0) << "]";
        list.add("orthonormality" + id.str(), dev, 1e-8);
    } else {
        for (const auto& lv : levels) {
            if (lv.m < 0) continue;
            const auto wf = normalize(p, lv);
            const double nsq = wf.norm * wf.norm * measure_inner_product(p, lv, lv);
            std::ostringstream id;
            id << "[n_r=" << lv.n_r << ",m=" << lv.m << "]";
            list.add("unit_norm" + id.str(), nsq - 1.0, 1e-10);
        }
    }

    for (const auto& lv : levels) {
        if (lv.m < 0) continue;
        std::ostringstream id;
        id << "[n_r=" << lv.n_r << ",m=" << lv.m << "]";
        list.add("rayleigh" + id.str(),
                 (rayleigh_quotient(p, lv) - lv.energy) / lv.energy, 1e-8);
    }
}

}  // namespace verify_detail

inline int cmd_verify(const RunConfig& cfg) {
    const ModelParams p = params_from(cfg);
    CheckList list;
    verify_detail::classical_checks(p, list);
    verify_detail::quantum_checks(p, cfg.grid_points, cfg.perturb_energy, list);

    OutputTarget target(cfg.out);
    std::ostream& os = target.stream();
    if (cfg.format == "json") {
        nlohmann::ordered_json j;
        auto& arr = j["checks"] = nlohmann::ordered_json::array();
        for (const auto& c : list.checks()) {
            nlohmann::ordered_json e;
            e["name"] = c.name;
            e["measured"] = c.measured;
            e["tolerance"] = c.tol;
            e["pass"] = c.pass;
            arr.push_back(e);
        }
        j["failures"] = list.failures();
        os << j.dump(2) << "\n";
    } else {
        for (const auto& c : list.checks())
            os << (c.pass ? "PASS " : "FAIL ") << c.name << " measured=" << g17(c.measured)
               << " tol=" << g17(c.tol) << "\n";
        os << "# checks=" << list.checks().size() << " failures=" << list.failures() << "\n";
    }
    return list.failures() == 0 ? 0 : 1;
}

}  // namespace curvosc_cli
