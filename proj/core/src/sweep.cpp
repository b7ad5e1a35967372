#include "dht/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "dht/errors.hpp"
#include "dht/gaussian.hpp"
#include "dht/info.hpp"
#include "dht/parallel.hpp"

namespace dht {

namespace {
constexpr double kLn2 = 0.6931471805599453;

double convert(double nats, Units u) { return u == Units::Bits ? nats / kLn2 : nats; }

std::string value_str(const ExtReal& v, Units u) {
    if (v.pos_inf()) return "inf";
    if (v.neg_inf()) return "-inf";
    return format_sig(convert(v.value(), u));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}
} // namespace

std::string format_sig(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

RunConfig preset_fig2() {
    RunConfig cfg;
    cfg.mode = RunMode::GaussianSweep;
    cfg.rho1 = 0.7;
    cfg.rate = 0.5;
    cfg.sweep.steps = 60;
    cfg.sweep.rho0_min = cfg.rho1 + (1.0 - cfg.rho1) * (1.0 / 61.0);
    cfg.sweep.rho0_max = cfg.rho1 + (1.0 - cfg.rho1) * (60.0 / 61.0);
    cfg.normalize = true;
    return cfg;
}

RunConfig preset_fig3() {
    RunConfig cfg;
    cfg.mode = RunMode::GaussianSweep;
    cfg.rho1 = 0.25;
    cfg.rate = 0.2;
    cfg.sweep.steps = 60;
    cfg.sweep.rho0_min = cfg.rho1 + (1.0 - cfg.rho1) * (1.0 / 61.0);
    cfg.sweep.rho0_max = cfg.rho1 + (1.0 - cfg.rho1) * (60.0 / 61.0);
    cfg.normalize = true;
    return cfg;
}

std::string run_gaussian_sweep(const RunConfig& cfg) {
    if (cfg.sweep.steps < 2) throw InputError("gaussian sweep: steps must be >= 2");
    if (!(cfg.rho1 >= 0.0 && cfg.rho1 < 1.0))
        throw InputError("gaussian sweep: rho1 outside [0,1)");
    if (!(cfg.rate >= 0.0)) throw InputError("gaussian sweep: rate must be non-negative");

    const int n = cfg.sweep.steps;
    std::vector<double> rho0(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        rho0[static_cast<size_t>(i)] = cfg.sweep.rho0_min +
                                       (cfg.sweep.rho0_max - cfg.sweep.rho0_min) * i / (n - 1);
    // region check before any evaluation
    for (int i = 0; i < n; ++i)
        if (!(cfg.rho1 < rho0[static_cast<size_t>(i)] && rho0[static_cast<size_t>(i)] < 1.0))
            throw InputError("gaussian sweep: point " + std::to_string(i) + " (rho0=" +
                             format_sig(rho0[static_cast<size_t>(i)]) +
                             ") leaves the region 0 <= rho1 < rho0 < 1");

    struct Row {
        GaussianBoundDetail d;
        double rw, cent;
    };
    std::vector<Row> rows(static_cast<size_t>(n));
    int threads = cfg.opt.threads > 0 ? cfg.opt.threads : default_threads();
    parallel_for(n, threads, [&](int i) {
        GaussianScenario scn(rho0[static_cast<size_t>(i)], cfg.rho1, cfg.rate);
        rows[static_cast<size_t>(i)] = {new_gaussian(scn), rw_gaussian(scn),
                                        centralized_gaussian(scn.rho0, scn.rho1)};
    });

    std::ostringstream out;
    out << "rho0,rho1,R,rho,rw_bound,new_bound,centralized,active_branch";
    if (cfg.normalize) out << ",rw_norm,new_norm,cent_norm";
    out << "\n";
    for (int i = 0; i < n; ++i) {
        const Row& r = rows[static_cast<size_t>(i)];
        double r0 = rho0[static_cast<size_t>(i)];
        double rw = convert(r.rw, cfg.units);
        double nv = convert(r.d.value, cfg.units);
        double ce = convert(r.cent, cfg.units);
        out << format_sig(r0) << ',' << format_sig(cfg.rho1) << ','
            << format_sig(convert(cfg.rate, cfg.units)) << ',' << format_sig(r.d.rho) << ','
            << format_sig(rw) << ',' << format_sig(nv) << ',' << format_sig(ce) << ','
            << (r.d.active_branch == GaussianBranch::New ? "new" : "rw");
        if (cfg.normalize) {
            double s = (r0 - cfg.rho1) * (r0 - cfg.rho1);
            out << ',' << format_sig(rw / s) << ',' << format_sig(nv / s) << ','
                << format_sig(ce / s);
        }
        out << "\n";
    }
    return out.str();
}

std::string gaussian_point_report(const RunConfig& cfg) {
    GaussianScenario scn(cfg.rho0, cfg.rho1, cfg.rate);
    GaussianBoundDetail d = new_gaussian(scn);
    double rw = rw_gaussian(scn);
    double cent = centralized_gaussian(scn.rho0, scn.rho1);
    SigmaHat sh = sigma_hat_sq(scn);
    RateMi mi = rate_mi_sigma(scn, sh.value);
    const char* unit = cfg.units == Units::Bits ? "bits" : "nats";

    std::ostringstream out;
    out << "gaussian point: rho0=" << format_sig(scn.rho0) << " rho1=" << format_sig(scn.rho1)
        << " R=" << format_sig(convert(scn.rate, cfg.units)) << " " << unit << "\n";
    out << "  effective rho    = " << format_sig(d.rho) << "\n";
    out << "  delta            = " << format_sig(d.delta) << "\n";
    out << "  sigma_hat^2      = " << format_sig(d.sigma_hat_sq) << "  (binding: "
        << (sh.binding == SigmaHat::Binding::Z ? "Z" : "Y") << ", I(X;U|Z)="
        << format_sig(convert(mi.i_xz, cfg.units)) << ", I(X;U|Y)="
        << format_sig(convert(mi.i_xy, cfg.units)) << ")\n";
    out << "  rw_bound         = " << format_sig(convert(rw, cfg.units)) << " " << unit << "\n";
    out << "  new_bound        = " << format_sig(convert(d.value, cfg.units)) << " " << unit
        << "  (branch: " << (d.active_branch == GaussianBranch::New ? "new" : "rw") << ")\n";
    out << "  centralized      = " << format_sig(convert(cent, cfg.units)) << " " << unit << "\n";
    if (cfg.normalize) {
        double s = (scn.rho0 - scn.rho1) * (scn.rho0 - scn.rho1);
        out << "  normalized (/(rho0-rho1)^2): rw=" << format_sig(convert(rw, cfg.units) / s)
            << " new=" << format_sig(convert(d.value, cfg.units) / s)
            << " centralized=" << format_sig(convert(cent, cfg.units) / s) << "\n";
    }
    return out.str();
}

namespace {

bool selected(const std::vector<std::string>& sel, const std::string& b) {
    return sel.empty() || std::find(sel.begin(), sel.end(), b) != sel.end();
}

struct ResultRow {
    std::string bound;
    std::string aux;
    ExtReal value{0.0};
    bool ok = true;
    std::string note;
};

} // namespace

DiscreteRun run_discrete(const RunConfig& cfg, const ScenarioFile& sf) {
    const DiscreteScenario& scn = sf.scenario;
    OptimizerConfig opt = cfg.opt;
    opt.seed = cfg.seed;

    DiscreteRun run;
    std::vector<ResultRow> rows;
    auto add_row = [&](ResultRow r) { rows.push_back(std::move(r)); };
    auto guarded = [&](const std::string& bound, const std::string& aux,
                       const std::function<ExtReal()>& fn, bool input_is_skip = false) {
        ResultRow r{bound, aux, ExtReal(0.0), true, ""};
        try {
            r.value = fn();
        } catch (const InputError& e) {
            r.ok = false;
            r.note = std::string(input_is_skip ? "skipped: " : "input error: ") + e.what();
            if (!input_is_skip) ++run.evaluation_errors;
        } catch (const EvaluationError& e) {
            r.ok = false;
            r.note = "evaluation error in " + bound + ": " + e.what();
            ++run.evaluation_errors;
        }
        add_row(std::move(r));
    };

    if (selected(cfg.bounds, "centralized"))
        guarded("centralized", "-", [&] { return centralized_bound(scn); });
    if (selected(cfg.bounds, "ac_lower"))
        guarded("ac_lower", "-", [&] { return ac_lower_bound(scn, opt).value; });

    for (const auto& na : sf.aux_receivers) {
        MembershipResult mr = membership_R_check(scn, na.aux, opt.membership_tol);
        MembershipResult mrt = membership_Rtilde_check(scn, na.aux, opt.membership_tol);
        {
            ResultRow r{"membership", na.name, ExtReal(0.0), true, ""};
            std::ostringstream note;
            note << "R: " << (mr.member ? "yes" : "no") << " (fact "
                 << format_sig(mr.factorization_residual) << ", marg "
                 << format_sig(mr.second_residual) << "); Rtilde: " << (mrt.member ? "yes" : "no")
                 << " (cond " << format_sig(mrt.second_residual) << ")";
            r.note = note.str();
            add_row(std::move(r));
        }
        if (selected(cfg.bounds, "g"))
            guarded("g", na.name, [&] {
                JointTable p_xz =
                    scn.p_xy.extend(na.aux.p_z_given_xy, {"X", "Y"}, "Z").marginal({"X", "Z"});
                JointTable q_xz =
                    scn.q_xy.extend(na.aux.q_z_given_xy, {"X", "Y"}, "Z").marginal({"X", "Z"});
                return g_bound(scn, p_xz.condition({"X"}), q_xz.condition({"X"}), opt).value;
            });
        if (selected(cfg.bounds, "addsub"))
            guarded("addsub", na.name,
                    [&] { return addsub_upper_bound(scn, na.aux, cfg.terminal, opt).value; });
        if (selected(cfg.bounds, "rw"))
            guarded("rw", na.name, [&] { return rw_bound(scn, na.aux, opt).value; }, true);
        if (selected(cfg.bounds, "corollary1"))
            guarded("corollary1", na.name,
                    [&] { return corollary1_bound(scn, na.aux, opt).value; }, true);
    }

    if (selected(cfg.bounds, "chain"))
        for (const auto& ch : sf.chains)
            guarded("chain", ch.name,
                    [&] { return chain_bound(scn, ch.links, cfg.terminal, opt).value; });

    if (selected(cfg.bounds, "j_augmented"))
        for (const auto& ja : sf.j_augmentations)
            guarded("j_augmented", ja.name, [&] {
                for (const auto& na : sf.aux_receivers)
                    if (na.name == ja.base_aux)
                        return j_augmented_bound(scn, ja.p_j_given_xyz, ja.q_j_given_xyz, na.aux,
                                                 opt, cfg.terminal)
                            .value;
                throw InputError("j augmentation '" + ja.name + "': unknown base aux '" +
                                 ja.base_aux + "'");
            });

    // per-bound minimum across aux receivers (upper bounds only)
    for (const char* b : {"g", "addsub", "rw", "corollary1"}) {
        std::vector<const ResultRow*> got;
        for (const auto& r : rows)
            if (r.bound == b && r.ok) got.push_back(&r);
        if (got.size() >= 2) {
            const ResultRow* best = got.front();
            for (const auto* r : got)
                if (r->value < best->value) best = r;
            add_row({std::string(b) + "_min", best->aux, best->value, true,
                     "minimum over aux receivers"});
        }
    }

    // sandwich-ordering warnings (1e-6 optimizer slack)
    auto find_val = [&](const std::string& bound, const std::string& aux) -> const ExtReal* {
        for (const auto& r : rows)
            if (r.bound == bound && r.aux == aux && r.ok) return &r.value;
        return nullptr;
    };
    const ExtReal* ac = find_val("ac_lower", "-");
    if (ac) {
        for (const auto& na : sf.aux_receivers) {
            const ExtReal* rw = find_val("rw", na.name);
            const ExtReal* c1 = find_val("corollary1", na.name);
            const ExtReal* as = find_val("addsub", na.name);
            auto gt = [](const ExtReal& a, const ExtReal& b) {
                return a.as_double() > b.as_double() + 1e-6;
            };
            if (c1 && gt(*ac, *c1))
                run.warnings.push_back("ordering violation: ac_lower > corollary1 on aux '" +
                                       na.name + "'");
            if (rw && gt(*ac, *rw))
                run.warnings.push_back("ordering violation: ac_lower > rw on aux '" + na.name +
                                       "'");
            if (c1 && rw && gt(*c1, *rw))
                run.warnings.push_back("ordering violation: corollary1 > rw on aux '" + na.name +
                                       "'");
            if (as && gt(*ac, *as))
                run.warnings.push_back("ordering violation: ac_lower > addsub on aux '" + na.name +
                                       "'");
        }
    }

    const char* unit = cfg.units == Units::Bits ? "bits" : "nats";
    std::ostringstream rep, csv;
    rep << "scenario: |X|=" << scn.x_size() << " |Y|=" << scn.y_size()
        << " rate=" << format_sig(convert(scn.rate, cfg.units)) << " " << unit << "\n";
    rep << "validation: D(P_XY||Q_XY)=" << value_str(sf.validation.d_pxy_qxy, cfg.units);
    for (const auto& [name, v] : sf.validation.d_pxz_qxz)
        rep << ", D(P_XZ||Q_XZ)[" << name << "]=" << value_str(v, cfg.units);
    rep << "\n\n";
    rep << "bound         aux           value(" << unit << ")     note\n";
    csv << "bound,aux,value,units,finite,note\n";
    for (const auto& r : rows) {
        char line[256];
        std::snprintf(line, sizeof(line), "%-13s %-13s %-15s %s\n", r.bound.c_str(),
                      r.aux.c_str(), r.ok ? value_str(r.value, cfg.units).c_str() : "-",
                      r.note.c_str());
        rep << line;
        csv << r.bound << ',' << r.aux << ',' << (r.ok ? value_str(r.value, cfg.units) : "")
            << ',' << unit << ',' << (r.ok && r.value.finite() ? "yes" : "no") << ",\""
            << r.note << "\"\n";
    }
    if (!run.warnings.empty()) {
        rep << "\nwarnings:\n";
        for (const auto& w : run.warnings) rep << "  " << w << "\n";
    }
    run.report = rep.str();
    run.csv = csv.str();
    return run;
}

std::string emit_plot_data(const std::string& csv, const std::string& style) {
    if (style != "whitespace")
        throw InputError("emit_plot_data: unknown style '" + style + "'");
    std::istringstream in(csv);
    std::string header;
    if (!std::getline(in, header)) throw InputError("emit_plot_data: empty CSV");
    std::vector<std::string> cols = split(header, ',');
    auto col = [&](const std::string& name) {
        for (size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return static_cast<int>(i);
        return -1;
    };
    int c_rho0 = col("rho0"), c_rho = col("rho");
    bool normalized = col("rw_norm") >= 0;
    int c_rw = normalized ? col("rw_norm") : col("rw_bound");
    int c_new = normalized ? col("new_norm") : col("new_bound");
    int c_cent = normalized ? col("cent_norm") : col("centralized");
    int c_rho1 = col("rho1"), c_rate = col("R");
    if (c_rho0 < 0 || c_rho < 0 || c_rw < 0 || c_new < 0 || c_cent < 0)
        throw InputError("emit_plot_data: CSV lacks the gaussian sweep columns");

    std::vector<std::string> lines;
    std::string line;
    std::string rho1_val = "?", rate_val = "?";
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f = split(line, ',');
        if (static_cast<int>(f.size()) <= std::max({c_rho0, c_rho, c_rw, c_new, c_cent}))
            throw InputError("emit_plot_data: short CSV row");
        if (rho1_val == "?" && c_rho1 >= 0) rho1_val = f[static_cast<size_t>(c_rho1)];
        if (rate_val == "?" && c_rate >= 0) rate_val = f[static_cast<size_t>(c_rate)];
        lines.push_back(f[static_cast<size_t>(c_rho0)] + " " + f[static_cast<size_t>(c_rho)] +
                        " " + f[static_cast<size_t>(c_rw)] + " " + f[static_cast<size_t>(c_new)] +
                        " " + f[static_cast<size_t>(c_cent)]);
    }
    if (lines.empty()) throw InputError("emit_plot_data: CSV has no data rows");

    std::ostringstream out;
    out << "# columns: rho0 rho rw_bound new_bound centralized\n";
    out << "# config: rho1=" << rho1_val << " R=" << rate_val << " points=" << lines.size()
        << " normalized=" << (normalized ? "yes" : "no") << "\n";
    for (const auto& l : lines) out << l << "\n";
    return out.str();
}

} // namespace dht
