#include "euler3b/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "euler3b/action_quadrature.hpp"
#include "euler3b/budget.hpp"
#include "euler3b/collision.hpp"
#include "euler3b/integrals.hpp"
#include "euler3b/kepler.hpp"
#include "euler3b/normal_form.hpp"
#include "euler3b/phase_portrait.hpp"

namespace e3b {

namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw)
{
    const std::string s = trim(raw);
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty() || !std::isfinite(v))
        throw ConfigError(key + ": not a finite number: '" + raw + "'");
    return v;
}

long to_long(const std::string& key, const std::string& raw)
{
    const std::string s = trim(raw);
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw ConfigError(key + ": not an integer: '" + raw + "'");
    return v;
}

std::vector<double> to_list(const std::string& key, const std::string& raw)
{
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

template <class E>
E to_enum(const std::string& key, const std::string& raw, const std::map<std::string, E>& names)
{
    auto it = names.find(trim(raw));
    if (it == names.end()) throw ConfigError(key + ": unknown value '" + raw + "'");
    return it->second;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

std::map<std::string, Setter> setters()
{
    std::map<std::string, Setter> s;
    auto num = [&](const std::string& key, double ExperimentConfig::*field) {
        s[key] = [key, field](ExperimentConfig& c, const std::string& v) { c.*field = to_double(key, v); };
    };
    auto integer = [&](const std::string& key, int ExperimentConfig::*field) {
        s[key] = [key, field](ExperimentConfig& c, const std::string& v) {
            c.*field = static_cast<int>(to_long(key, v));
        };
    };
    auto vec = [&](const std::string& key, Vec3 ExperimentConfig::*field, int i) {
        s[key] = [key, field, i](ExperimentConfig& c, const std::string& v) { (c.*field)[i] = to_double(key, v); };
    };
    auto cart = [&](const std::string& key, Vec3 CartesianState::*field, int i) {
        s[key] = [key, field, i](ExperimentConfig& c, const std::string& v) {
            (c.cartesian.*field)[i] = to_double(key, v);
        };
    };
    auto kc = [&](const std::string& key, double PlanarKCoordinates::*field) {
        s[key] = [key, field](ExperimentConfig& c, const std::string& v) { c.k.*field = to_double(key, v); };
    };
    auto chart = [&](const std::string& key, double ChartBox::*field) {
        s[key] = [key, field](ExperimentConfig& c, const std::string& v) { c.nf_chart.*field = to_double(key, v); };
    };

    s["experiment.scenario"] = [](ExperimentConfig&, const std::string&) {};
    s["experiment.seed"] = [](ExperimentConfig& c, const std::string& v) {
        const long x = to_long("experiment.seed", v);
        if (x < 0) throw ConfigError("experiment.seed: must be non-negative");
        c.seed = static_cast<std::uint64_t>(x);
    };
    s["experiment.out"] = [](ExperimentConfig& c, const std::string& v) { c.out = trim(v); };

    num("masses.m0", &ExperimentConfig::m0);
    num("masses.mu", &ExperimentConfig::mu);
    num("masses.eps", &ExperimentConfig::eps);

    s["initial.mode"] = [](ExperimentConfig& c, const std::string& v) {
        c.initial = to_enum<InitialMode>(
            "initial.mode", v,
            {{"ellipse", InitialMode::Ellipse}, {"cartesian", InitialMode::Cartesian}, {"k", InitialMode::K}});
    };
    num("initial.a", &ExperimentConfig::a);
    num("initial.e", &ExperimentConfig::e);
    num("initial.g", &ExperimentConfig::g);
    vec("initial.xp1", &ExperimentConfig::x_prime, 0);
    vec("initial.xp2", &ExperimentConfig::x_prime, 1);
    cart("initial.yp1", &CartesianState::y_prime, 0);
    cart("initial.yp2", &CartesianState::y_prime, 1);
    cart("initial.y1", &CartesianState::y, 0);
    cart("initial.y2", &CartesianState::y, 1);
    cart("initial.x1", &CartesianState::x, 0);
    cart("initial.x2", &CartesianState::x, 1);
    kc("initial.C", &PlanarKCoordinates::C);
    kc("initial.G", &PlanarKCoordinates::G);
    kc("initial.Lambda", &PlanarKCoordinates::Lambda);
    kc("initial.R_prime", &PlanarKCoordinates::R_prime);
    kc("initial.zeta", &PlanarKCoordinates::zeta);
    kc("initial.g_node", &PlanarKCoordinates::g_node);
    kc("initial.g_peri", &PlanarKCoordinates::g_peri);
    kc("initial.ell", &PlanarKCoordinates::ell);
    kc("initial.r_prime", &PlanarKCoordinates::r_prime);
    s["initial.sigma"] = [](ExperimentConfig& c, const std::string& v) {
        const long x = to_long("initial.sigma", v);
        if (x != 1 && x != -1) throw ConfigError("initial.sigma: must be 1 or -1");
        c.k.sigma = static_cast<int>(x);
    };

    s["integrator.model"] = [](ExperimentConfig& c, const std::string& v) {
        c.model = to_enum<FlowModel>("integrator.model", v,
                                     {{"three_body", FlowModel::ThreeBody},
                                      {"truncated", FlowModel::Truncated},
                                      {"two_centre", FlowModel::TwoCentre}});
    };
    s["integrator.method"] = [](ExperimentConfig& c, const std::string& v) {
        c.method = to_enum<Method>("integrator.method", v, {{"rk87", Method::RK87}, {"splitting", Method::Splitting}});
    };
    num("integrator.tol", &ExperimentConfig::tol);
    num("integrator.step", &ExperimentConfig::step);
    num("integrator.t_end", &ExperimentConfig::t_end);
    s["integrator.unit"] = [](ExperimentConfig& c, const std::string& v) {
        c.unit = to_enum<TimeUnit>("integrator.unit", v,
                                   {{"time", TimeUnit::Time},
                                    {"inner_periods", TimeUnit::InnerPeriods},
                                    {"outer_periods", TimeUnit::OuterPeriods}});
    };
    integer("integrator.samples", &ExperimentConfig::samples);
    num("integrator.floor_factor", &ExperimentConfig::floor_factor);
    s["integrator.max_steps"] = [](ExperimentConfig& c, const std::string& v) {
        c.max_steps = to_long("integrator.max_steps", v);
    };

    s["portrait.deltas"] = [](ExperimentConfig& c, const std::string& v) {
        c.portrait_deltas = to_list("portrait.deltas", v);
    };
    integer("portrait.levels", &ExperimentConfig::portrait_levels);
    integer("portrait.samples", &ExperimentConfig::portrait_samples);

    s["actions.deltas"] = [](ExperimentConfig& c, const std::string& v) {
        c.action_deltas = to_list("actions.deltas", v);
    };
    integer("actions.points", &ExperimentConfig::action_points);
    integer("actions.probes", &ExperimentConfig::action_probes);

    num("normalform.omega", &ExperimentConfig::nf_omega);
    num("normalform.omega0", &ExperimentConfig::nf_omega0);
    num("normalform.eps", &ExperimentConfig::nf_eps);
    integer("normalform.steps", &ExperimentConfig::nf_steps);
    chart("normalform.I0", &ChartBox::I0);
    chart("normalform.y0", &ChartBox::y0);
    chart("normalform.half_I", &ChartBox::half_I);
    chart("normalform.half_y", &ChartBox::half_y);
    chart("normalform.half_x", &ChartBox::half_x);
    chart("normalform.r", &ChartBox::r);
    chart("normalform.rho", &ChartBox::rho);
    chart("normalform.xi", &ChartBox::xi);
    chart("normalform.s", &ChartBox::s);
    chart("normalform.delta", &ChartBox::delta);

    num("collision.safety", &ExperimentConfig::safety);
    integer("collision.probes", &ExperimentConfig::collision_probes);

    num("budget.eps", &ExperimentConfig::b_eps);
    num("budget.mu", &ExperimentConfig::b_mu);
    num("budget.eta", &ExperimentConfig::b_eta);
    num("budget.kappa", &ExperimentConfig::b_kappa);
    num("budget.rho_minus", &ExperimentConfig::b_rho_minus);
    num("budget.rho_plus", &ExperimentConfig::b_rho_plus);
    num("budget.eps0", &ExperimentConfig::b_eps0);
    num("budget.alpha", &ExperimentConfig::b_alpha);
    return s;
}

void validate(const ExperimentConfig& c)
{
    auto need = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(what);
    };
    try {
        MassModel ms(c.m0, c.mu, c.eps);
        (void)ms;
        validate_chart(c.nf_chart);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    need(c.tol > 0, "integrator.tol: must be positive");
    need(c.step >= 0, "integrator.step: must be non-negative");
    need(c.t_end > 0, "integrator.t_end: must be positive");
    need(c.samples > 0, "integrator.samples: must be positive");
    need(c.floor_factor > 0, "integrator.floor_factor: must be positive");
    need(c.max_steps > 0, "integrator.max_steps: must be positive");
    need(c.method != Method::Splitting || c.step > 0, "integrator.step: splitting needs a positive step");
    need(c.initial != InitialMode::Ellipse || (c.a > 0 && c.e >= 0 && c.e < 1), "initial: need a > 0, 0 <= e < 1");
    for (double d : c.portrait_deltas) need(d > 0 && d < 2, "portrait.deltas: values must lie in (0, 2)");
    for (double d : c.action_deltas) need(d > 0 && d < 2, "actions.deltas: values must lie in (0, 2)");
    need(c.portrait_levels > 0 && c.portrait_samples >= 8, "portrait: need levels > 0 and samples >= 8");
    need(c.action_points > 0 && c.action_probes >= 0, "actions: need points > 0 and probes >= 0");
    need(c.nf_steps > 0, "normalform.steps: must be positive");
    need(c.nf_omega0 != 0, "normalform.omega0: must be nonzero");
    need(c.safety >= 1, "collision.safety: must be >= 1");
    need(c.collision_probes >= 0, "collision.probes: must be non-negative");
    need(c.b_alpha > 0 && c.b_alpha < 0.5, "budget.alpha: must lie in (0, 1/2)");
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Writes path through a temporary sibling and a rename.
std::string write_file(const std::string& dir, const std::string& name, const std::string& content)
{
    const fs::path p = fs::path(dir) / name;
    const fs::path tmp = fs::path(dir) / (name + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + tmp.string());
        os << content;
        if (!os) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, p);
    return p.string();
}

void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
}

MassModel masses(const ExperimentConfig& c) { return MassModel(c.m0, c.mu, c.eps); }

}  // namespace

std::vector<std::string> scenario_names() { return {"custom", "sun-earth-asteroid", "two-centre", "kepler-limit"}; }

void apply_scenario(ExperimentConfig& cfg, const std::string& name)
{
    cfg = ExperimentConfig{};
    cfg.scenario = name;
    if (name == "custom") return;
    if (name == "sun-earth-asteroid") {
        cfg.mu = 1e-3;
        cfg.eps = 1e-3;
        cfg.a = 2;
        cfg.e = 0.3;
        cfg.g = 1;
        cfg.x_prime = {1, 0, 0};
        cfg.model = FlowModel::ThreeBody;
        cfg.t_end = 50;
        cfg.unit = TimeUnit::OuterPeriods;
        cfg.samples = 50;
        return;
    }
    if (name == "two-centre" || name == "kepler-limit") {
        cfg.mu = name == "two-centre" ? 1e-3 : 0;
        cfg.a = 1;
        cfg.e = 0.3;
        cfg.g = 0.4;
        cfg.x_prime = {4, 0, 0};
        cfg.model = FlowModel::TwoCentre;
        cfg.t_end = 100;
        cfg.unit = TimeUnit::InnerPeriods;
        cfg.samples = 100;
        return;
    }
    throw ConfigError("unknown scenario '" + name + "'");
}

ExperimentConfig parse_config(std::istream& is)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    ExperimentConfig cfg;
    if (auto sc = tree.get_optional<std::string>("experiment.scenario")) {
        apply_scenario(cfg, trim(*sc));
    }
    const auto table = setters();
    for (const auto& [section, body] : tree) {
        static const std::vector<std::string> known = {"experiment", "masses", "initial", "integrator",
                                                       "portrait", "actions", "normalform", "collision", "budget"};
        if (!body.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
        if (std::find(known.begin(), known.end(), section) == known.end())
            throw ConfigError("config: unknown section [" + section + "]");
        for (const auto& [key, leaf] : body) {
            const std::string full = section + "." + key;
            auto it = table.find(full);
            if (it == table.end()) throw ConfigError("config: unknown key '" + full + "'");
            it->second(cfg, leaf.data());
        }
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    return parse_config(is);
}

CartesianState initial_state(const ExperimentConfig& cfg, const MassModel& ms)
{
    switch (cfg.initial) {
    case InitialMode::Ellipse:
        return planar_ellipse_state(cfg.a, cfg.e, cfg.g, cfg.x_prime, ms);
    case InitialMode::Cartesian: {
        CartesianState s = cfg.cartesian;
        s.x_prime = cfg.x_prime;
        s.dim = 2;
        return s;
    }
    case InitialMode::K:
        return planar_k_to_cartesian(cfg.k, ms);
    }
    throw ConfigError("initial: bad mode");
}

IntegratorConfig integrator_config(const ExperimentConfig& cfg, const MassModel& ms)
{
    IntegratorConfig ic;
    ic.method = cfg.method;
    ic.tol = cfg.tol;
    ic.step = cfg.step;
    ic.floor_factor = cfg.floor_factor;
    ic.max_steps = cfg.max_steps;
    double unit = 1;
    const CartesianState s0 = initial_state(cfg, ms);
    if (cfg.unit == TimeUnit::InnerPeriods) {
        const double a = cfg.initial == InitialMode::Ellipse ? cfg.a : elements_from_cartesian(s0.y, s0.x, ms).a;
        unit = inner_period(a, ms);
    } else if (cfg.unit == TimeUnit::OuterPeriods) {
        unit = outer_period(norm(s0.x_prime), ms);
    }
    ic.t_end = cfg.t_end * unit;
    ic.sample_dt = ic.t_end / cfg.samples;
    return ic;
}

Trajectory run_flow(const ExperimentConfig& cfg)
{
    const MassModel ms = masses(cfg);
    const CartesianState s0 = initial_state(cfg, ms);
    const IntegratorConfig ic = integrator_config(cfg, ms);
    if (cfg.model == FlowModel::TwoCentre) return flow_two_centre(s0, ms, ic);
    return flow_three_body(s0, ms, ic, cfg.model == FlowModel::Truncated);
}

std::vector<std::string> command_names() { return {"simulate", "portrait", "actions", "normalform", "collision", "budget"}; }

CommandResult cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir)
{
    ensure_dir(out_dir);
    const MassModel ms = masses(cfg);
    const Trajectory traj = run_flow(cfg);
    CommandResult r;
    std::ostringstream tr;
    write_trajectory_csv(tr, traj);
    r.files.push_back(write_file(out_dir, "trajectory.csv", tr.str()));

    const DriftReport rep = euler_drift_report(traj, ms);
    std::ostringstream dr;
    dr << "t,E_drift\n";
    for (const auto& [t, d] : rep.drift_at) dr << fmt(t) << ',' << fmt(d) << '\n';
    r.files.push_back(write_file(out_dir, "drift.csv", dr.str()));

    std::ostringstream sm;
    sm << "scenario " << cfg.scenario << "\nsamples " << traj.samples.size() << "\nsteps " << traj.steps
       << "\nrejected " << traj.rejected << "\ntruncated " << (traj.truncated ? traj.truncation_reason : "no")
       << "\nmax_E_drift " << fmt(rep.max_drift) << "\nmax_E_drift_normalized " << fmt(rep.max_drift_normalized)
       << "\nmax_H_rel_drift " << fmt(rep.max_H_rel_drift) << "\nmax_J_rel_drift " << fmt(rep.max_J_rel_drift)
       << '\n';
    r.summary = sm.str();
    r.files.push_back(write_file(out_dir, "simulate_summary.txt", r.summary));
    return r;
}

CommandResult cmd_portrait(const ExperimentConfig& cfg, const std::string& out_dir)
{
    ensure_dir(out_dir);
    std::ostringstream crit, lev, sep;
    crit << "delta,kind,g,G_hat,E_hat\n";
    lev << "delta,E_hat,regime,case,component,branch,g,G_hat\n";
    sep << "delta,area_S0,area_S1,nesting\n";
    std::ostringstream sm;
    for (double d : cfg.portrait_deltas) {
        for (const CriticalPoint& c : critical_points(d))
            crit << fmt(d) << ',' << c.kind << ',' << fmt(c.g) << ',' << fmt(c.G_hat) << ',' << fmt(c.value) << '\n';
        const double lo = -d, hi = 1 + d * d / 4;
        std::vector<double> levels;
        for (int i = 0; i < cfg.portrait_levels; ++i) levels.push_back(lo + (hi - lo) * (i + 0.5) / cfg.portrait_levels);
        levels.push_back(d);
        if (d != 1) levels.push_back(1);
        std::sort(levels.begin(), levels.end());
        for (double E : levels) {
            const LevelCurve lc = sample_level_curve(E, d, cfg.portrait_samples);
            const PortraitClassification pc = classify(E, d);
            for (std::size_t ci = 0; ci < lc.components.size(); ++ci)
                for (const LevelBranch& b : lc.components[ci].branches)
                    for (const Point& p : b.points)
                        lev << fmt(d) << ',' << fmt(E) << ',' << regime_name(lc.regime) << ',' << pc.case_label << ','
                            << ci << ',' << b.label << ',' << fmt(p[0]) << ',' << fmt(p[1]) << '\n';
        }
        const double a0 = sublevel_area(sample_level_curve(d, d, 20000));
        const double a1 = sublevel_area(sample_level_curve(1, d, 20000));
        const char* nest = std::abs(a0 - a1) < 1e-6 ? "coincide" : (a0 < a1 ? "S0_inner" : "S1_inner");
        sep << fmt(d) << ',' << fmt(a0) << ',' << fmt(a1) << ',' << nest << '\n';
        sm << "delta " << fmt(d) << ": " << nest << '\n';
    }
    CommandResult r;
    r.files.push_back(write_file(out_dir, "portrait_critical.csv", crit.str()));
    r.files.push_back(write_file(out_dir, "portrait_levels.csv", lev.str()));
    r.files.push_back(write_file(out_dir, "portrait_separatrices.csv", sep.str()));
    r.summary = sm.str();
    return r;
}

CommandResult cmd_actions(const ExperimentConfig& cfg, const std::string& out_dir)
{
    ensure_dir(out_dir);
    std::ostringstream tab, prb;
    tab << "delta,E_hat,region,G0_hat,dG0_hat_dE\n";
    prb << "delta,E_hat,dG0_quadrature,dG0_finite_difference,rel_diff\n";
    std::mt19937_64 rng(cfg.seed);
    double worst = 0;
    for (double d : cfg.action_deltas) {
        const double lo = -d, hi = 1 + d * d / 4;
        for (int i = 0; i < cfg.action_points; ++i) {
            const double E = lo + (hi - lo) * (i + 0.5) / cfg.action_points;
            const int region = E < std::min(d, 1.0) ? 1 : (E < std::max(d, 1.0) ? 2 : 3);
            double dG = std::numeric_limits<double>::quiet_NaN();
            try {
                dG = dG0_hat_dE(E, d);
            } catch (const DomainError&) {
            }
            tab << fmt(d) << ',' << fmt(E) << ',' << region << ',' << fmt(G0_hat(E, d)) << ',' << fmt(dG) << '\n';
        }
        std::uniform_real_distribution<double> U(lo, hi);
        for (int i = 0; i < cfg.action_probes;) {
            const double E = U(rng), h = 1e-6;
            if (std::min({E - lo, hi - E, std::abs(E - d), std::abs(E - 1)}) < 1e-2) continue;
            const double q = dG0_hat_dE(E, d);
            const double fd = (G0_hat(E + h, d) - G0_hat(E - h, d)) / (2 * h);
            const double rel = std::abs(q - fd) / std::abs(q);
            worst = std::max(worst, rel);
            prb << fmt(d) << ',' << fmt(E) << ',' << fmt(q) << ',' << fmt(fd) << ',' << fmt(rel) << '\n';
            ++i;
        }
    }
    CommandResult r;
    r.files.push_back(write_file(out_dir, "actions.csv", tab.str()));
    r.files.push_back(write_file(out_dir, "actions_probes.csv", prb.str()));
    r.summary = "worst probe rel_diff " + fmt(worst) + "\n";
    return r;
}

CommandResult cmd_normalform(const ExperimentConfig& cfg, const std::string& out_dir)
{
    ensure_dir(out_dir);
    const NormalFormConstants cst = NormalFormConstants::defaults(1, 0);
    const DeskCase dc = desk_case(cfg.nf_omega, cfg.nf_omega0, cfg.nf_eps, cfg.nf_chart);
    std::ostringstream cert, norms;
    cert << "step,check,lhs,rhs,ok,hypothesis,margin\n";
    norms << "step,norm_f,norm_f_tilde,norm_phi,norm_f_plus,norm_f_tilde_plus,homological_residual,frozen_residual,"
             "discarded\n";
    auto put = [&](int step, const Inequality& q) {
        cert << step << ',' << q.name << ',' << fmt(q.lhs) << ',' << fmt(q.rhs) << ',' << (q.ok ? 1 : 0) << ','
             << (q.hypothesis ? 1 : 0) << ',' << fmt(q.margin()) << '\n';
    };
    CommandResult r;
    auto run = [&] {
        try {
            return normal_form_N(dc.h0, dc.f, cfg.nf_steps, cst);
        } catch (const HypothesisError& e) {
            cert << "0," << e.inequality << ",nan,nan,0,1,nan\n";
            write_file(out_dir, "normalform_certificates.csv", cert.str());
            throw;
        }
    };
    const NormalFormResult res = run();
    for (const Inequality& q : res.assumptions) put(0, q);
    for (std::size_t i = 0; i < res.steps.size(); ++i) {
        const StepCertificate& s = res.steps[i];
        for (const Inequality& q : s.checks) put(static_cast<int>(i + 1), q);
        norms << i + 1 << ',' << fmt(s.norm_f) << ',' << fmt(s.norm_f_tilde) << ',' << fmt(s.norm_phi) << ','
              << fmt(s.norm_f_plus) << ',' << fmt(s.norm_f_tilde_plus) << ',' << fmt(s.homological_residual) << ','
              << fmt(s.frozen_residual) << ',' << fmt(s.discarded) << '\n';
    }
    r.files.push_back(write_file(out_dir, "normalform_certificates.csv", cert.str()));
    r.files.push_back(write_file(out_dir, "normalform_norms.csv", norms.str()));
    std::ostringstream gs, fs_;
    write_series(gs, res.g);
    write_series(fs_, res.f);
    r.files.push_back(write_file(out_dir, "normalform_g.txt", gs.str()));
    r.files.push_back(write_file(out_dir, "normalform_f.txt", fs_.str()));
    std::ostringstream sm;
    sm << "certified steps " << res.certified_steps << " of " << cfg.nf_steps << '\n';
    if (!res.failure.empty()) sm << "failure " << res.failure << '\n';
    for (std::size_t i = 0; i < res.steps.size(); ++i)
        sm << "step " << i + 1 << " |f+| " << fmt(res.steps[i].norm_f_plus) << '\n';
    r.summary = sm.str();
    return r;
}

CommandResult cmd_collision(const ExperimentConfig& cfg, const std::string& out_dir)
{
    ensure_dir(out_dir);
    const MassModel ms = masses(cfg);
    const ExclusionSweep sw = sweep_exclusion(run_flow(cfg), ms, cfg.safety);
    CommandResult r;
    std::ostringstream vs;
    write_verdict_csv(vs, sw);
    r.files.push_back(write_file(out_dir, "collision_verdicts.csv", vs.str()));

    std::ostringstream pr;
    pr << "Lambda,G,g_peri,ell,r_prime,E0_minus_focal,margin,threshold,excluded\n";
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(0, 1);
    const double k = ms.mr() * ms.mr() * ms.Mr();
    double worst = 0;
    for (int i = 0; i < cfg.collision_probes;) {
        PlanarKCoordinates kc;
        kc.G = 0.4 + 0.8 * U(rng);
        kc.Lambda = kc.G / (0.3 + 0.68 * U(rng));
        kc.C = kc.G + 0.1 + 0.9 * U(rng);
        kc.g_peri = pi * (2 * U(rng) - 1);
        kc.ell = pi * (2 * U(rng) - 1);
        kc.r_prime = focal_radius(kc.Lambda, kc.G, kc.g_peri, ms).r_prime;
        CartesianState s;
        EulerParts p;
        try {
            s = planar_k_to_cartesian(kc, ms);
            p = euler_decomposition(s.y, s.x, s.x_prime, ms);
        } catch (const SingularityError&) {
            continue;
        }
        const CollisionVerdict v = exclusion_verdict(s, ms, cfg.safety);
        const double res = p.E0 - k * kc.r_prime;
        worst = std::max(worst, std::abs(res));
        pr << fmt(kc.Lambda) << ',' << fmt(kc.G) << ',' << fmt(kc.g_peri) << ',' << fmt(kc.ell) << ','
           << fmt(kc.r_prime) << ',' << fmt(res) << ',' << fmt(v.margin) << ',' << fmt(v.threshold) << ','
           << (v.excluded ? 1 : 0) << '\n';
        ++i;
    }
    r.files.push_back(write_file(out_dir, "collision_focal_probes.csv", pr.str()));
    std::ostringstream sm;
    sm << "entered_band " << (sw.entered_band ? "yes" : "no") << "\nmax_margin_decay_over_threshold "
       << fmt(sw.max_margin_decay) << "\nmin_separation " << fmt(sw.min_separation) << "\nworst_focal_E0_residual "
       << fmt(worst) << '\n';
    r.summary = sm.str();
    return r;
}

CommandResult cmd_budget(const ExperimentConfig& cfg, const std::string& out_dir)
{
    ensure_dir(out_dir);
    Theorem5Options opt;
    opt.alpha = cfg.b_alpha;
    const Theorem5Budget t = theorem5_budget(cfg.b_eps, cfg.b_mu, cfg.b_eta, cfg.b_kappa, cfg.b_rho_minus,
                                             cfg.b_rho_plus, cfg.b_eps0, opt);
    const StabilityBudget& b = t.budget;
    std::vector<std::pair<std::string, double>> rows = {
        {"eps", t.eps}, {"mu", t.mu}, {"eta", t.eta}, {"kappa", t.kappa}, {"rho_minus", t.rho_minus},
        {"rho_plus", t.rho_plus}, {"eps0", t.eps0}, {"alpha", cfg.b_alpha}, {"E", t.E}, {"s0", t.s0},
        {"eps_scaling", t.eps_scaling}, {"eps_star", t.eps_star}, {"a", b.in.a}, {"M0", b.in.M0}, {"M1", b.in.M1},
        {"M", b.in.M}, {"M0_prime", b.in.M0_prime}, {"rho", b.in.rho}, {"s", b.in.s}, {"delta", b.in.delta},
        {"Delta", b.in.Delta}, {"p_star", b.p_star}, {"c_n", b.c_n}, {"c", b.c}, {"eps_budget", b.eps},
        {"eps_prime", b.eps_prime}, {"N", b.N}, {"T1", b.T1}, {"T0", b.T0}, {"T0_companion", b.T0_companion},
        {"log2_horizon", b.log2_horizon}, {"T0_valid", b.T0_valid}, {"assump3", b.assump3},
        {"simplify1", b.simplify1}, {"simplify2", b.simplify2}, {"eps_ok", b.eps_ok},
        {"eps_prime_ok", b.eps_prime_ok}, {"verdict", t.verdict()}};
    std::ostringstream os;
    os << "key,value\n";
    for (const auto& [key, v] : rows) os << key << ',' << fmt(v) << '\n';
    CommandResult r;
    r.files.push_back(write_file(out_dir, "budget.csv", os.str()));
    r.summary = "T1 " + fmt(b.T1) + "\nverdict " + (t.verdict() ? "pass" : "fail") + "\n";
    return r;
}

CommandResult run_command(const std::string& name, const ExperimentConfig& cfg, const std::string& out_dir)
{
    if (name == "simulate") return cmd_simulate(cfg, out_dir);
    if (name == "portrait") return cmd_portrait(cfg, out_dir);
    if (name == "actions") return cmd_actions(cfg, out_dir);
    if (name == "normalform") return cmd_normalform(cfg, out_dir);
    if (name == "collision") return cmd_collision(cfg, out_dir);
    if (name == "budget") return cmd_budget(cfg, out_dir);
    throw ConfigError("unknown command '" + name + "'");
}

}  // namespace e3b
