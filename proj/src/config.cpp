#include <cstdio>
#include <fstream>
#include <sstream>

#include "lflx/config.hpp"

namespace lflx {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("config: bad number for " + key + ": '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
    }
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : v) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& tok : split_list(v))
        if (!tok.empty()) out.push_back(parse_double(key, tok));
    if (out.empty()) throw ConfigError("config: empty list for " + key);
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const auto& tok : split_list(v))
        if (!tok.empty()) out.push_back(static_cast<int>(parse_int(key, tok)));
    return out;
}

InitialSpec::Kind initial_kind(const std::string& v) {
    if (v == "zero") return InitialSpec::Kind::Zero;
    if (v == "shear") return InitialSpec::Kind::Shear;
    if (v == "taylor_green") return InitialSpec::Kind::TaylorGreen;
    if (v == "taylor_green_perturbed") return InitialSpec::Kind::TaylorGreenPerturbed;
    if (v == "random_besov") return InitialSpec::Kind::RandomBesov;
    if (v == "single_mode") return InitialSpec::Kind::SingleMode;
    throw ConfigError("config: unknown initial kind '" + v + "'");
}

std::string initial_name(InitialSpec::Kind k) {
    switch (k) {
        case InitialSpec::Kind::Zero: return "zero";
        case InitialSpec::Kind::Shear: return "shear";
        case InitialSpec::Kind::TaylorGreen: return "taylor_green";
        case InitialSpec::Kind::TaylorGreenPerturbed: return "taylor_green_perturbed";
        case InitialSpec::Kind::RandomBesov: return "random_besov";
        case InitialSpec::Kind::SingleMode: return "single_mode";
    }
    return "zero";
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    int dim = cfg.solver.grid.dim();
    int n = cfg.solver.grid.n();

    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const std::string skey = section + "." + key;

        auto& sv = cfg.solver;
        auto& an = cfg.analysis;
        auto& sw = cfg.sweep;
        if (skey == "solver.dim") dim = static_cast<int>(parse_int(skey, val));
        else if (skey == "solver.n") n = static_cast<int>(parse_int(skey, val));
        else if (skey == "solver.nu") sv.nu = parse_double(skey, val);
        else if (skey == "solver.dt") sv.dt = parse_double(skey, val);
        else if (skey == "solver.t_end") sv.t_end = parse_double(skey, val);
        else if (skey == "solver.snapshot_stride") sv.snapshot_stride = static_cast<int>(parse_int(skey, val));
        else if (skey == "solver.cfl_safety") sv.cfl_safety = parse_double(skey, val);
        else if (skey == "solver.blowup_factor") sv.blowup_factor = parse_double(skey, val);
        else if (skey == "solver.forcing") {
            if (val == "none") sv.forcing.kind = ForcingSpec::Kind::None;
            else if (val == "fixed_low_mode") sv.forcing.kind = ForcingSpec::Kind::FixedLowMode;
            else throw ConfigError("config: unknown forcing '" + val + "'");
        }
        else if (skey == "solver.forcing_amplitude") sv.forcing.amplitude = parse_double(skey, val);
        else if (skey == "solver.forcing_k") sv.forcing.k_f = static_cast<int>(parse_int(skey, val));
        else if (skey == "solver.initial") sv.initial.kind = initial_kind(val);
        else if (skey == "solver.sigma") sv.initial.synth.sigma = parse_double(skey, val);
        else if (skey == "solver.seed") sv.initial.synth.seed = static_cast<std::uint64_t>(parse_int(skey, val));
        else if (skey == "solver.k_min") sv.initial.synth.k_min = static_cast<int>(parse_int(skey, val));
        else if (skey == "solver.k_max") sv.initial.synth.k_max = static_cast<int>(parse_int(skey, val));
        else if (skey == "solver.amplitude") sv.initial.synth.amplitude = parse_double(skey, val);
        else if (skey == "solver.perturbation") sv.initial.perturbation = parse_double(skey, val);
        else if (skey == "solver.mode_k") {
            auto v = parse_int_list(skey, val);
            if (v.size() != 3) throw ConfigError("config: mode_k needs 3 integers");
            sv.initial.synth.k = {v[0], v[1], v[2]};
        }
        else if (skey == "solver.mode_axis") sv.initial.synth.axis = static_cast<int>(parse_int(skey, val));
        else if (skey == "analysis.ell_list") an.ell_list = parse_double_list(skey, val);
        else if (skey == "analysis.p_list") an.p_list = parse_double_list(skey, val);
        else if (skey == "analysis.separations") {
            if (val == "dyadic") an.separations.clear();
            else an.separations = parse_int_list(skey, val);
        }
        else if (skey == "analysis.directions") {
            if (val != "axes" && val != "axes+diagonals")
                throw ConfigError("config: directions must be axes or axes+diagonals");
            an.directions = val;
        }
        else if (skey == "analysis.fit_r_min") an.fit_r_min = parse_double(skey, val);
        else if (skey == "analysis.fit_r_max") an.fit_r_max = parse_double(skey, val);
        else if (skey == "analysis.ell0") an.ell0 = parse_double(skey, val);
        else if (skey == "analysis.sigma_list") an.sigma_list = parse_double_list(skey, val);
        else if (skey == "analysis.mollifier") {
            if (val != "bump" && val != "gaussian")
                throw ConfigError("config: mollifier must be bump or gaussian");
            an.mollifier = val;
        }
        else if (skey == "analysis.analysis_stride") an.analysis_stride = static_cast<int>(parse_int(skey, val));
        else if (skey == "analysis.epsilon") an.epsilon = parse_double(skey, val);
        else if (skey == "analysis.consistency_tol") an.consistency_tol = parse_double(skey, val);
        else if (skey == "sweep.nu_list") sw.nu_list = parse_double_list(skey, val);
        else if (skey == "sweep.seed_list") {
            sw.seed_list.clear();
            for (int s : parse_int_list(skey, val)) sw.seed_list.push_back(static_cast<std::uint64_t>(s));
        }
        else if (skey == "output.dir") cfg.output_dir = val;
        else throw ConfigError("config: unknown key '" + skey + "'");
    }

    try {
        cfg.solver.grid = Grid(dim, n);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

std::string ExperimentConfig::serialize() const {
    std::ostringstream o;
    auto dlist = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + format_double(v[i]);
        return s;
    };
    o << "[solver]\n";
    o << "dim = " << solver.grid.dim() << "\n";
    o << "n = " << solver.grid.n() << "\n";
    o << "nu = " << format_double(solver.nu) << "\n";
    o << "dt = " << format_double(solver.dt) << "\n";
    o << "t_end = " << format_double(solver.t_end) << "\n";
    o << "snapshot_stride = " << solver.snapshot_stride << "\n";
    o << "cfl_safety = " << format_double(solver.cfl_safety) << "\n";
    o << "blowup_factor = " << format_double(solver.blowup_factor) << "\n";
    o << "forcing = "
      << (solver.forcing.kind == ForcingSpec::Kind::None ? "none" : "fixed_low_mode") << "\n";
    o << "forcing_amplitude = " << format_double(solver.forcing.amplitude) << "\n";
    o << "forcing_k = " << solver.forcing.k_f << "\n";
    o << "initial = " << initial_name(solver.initial.kind) << "\n";
    o << "sigma = " << format_double(solver.initial.synth.sigma) << "\n";
    o << "seed = " << solver.initial.synth.seed << "\n";
    o << "k_min = " << solver.initial.synth.k_min << "\n";
    o << "k_max = " << solver.initial.synth.k_max << "\n";
    o << "amplitude = " << format_double(solver.initial.synth.amplitude) << "\n";
    o << "perturbation = " << format_double(solver.initial.perturbation) << "\n";
    o << "mode_k = " << solver.initial.synth.k[0] << "," << solver.initial.synth.k[1] << ","
      << solver.initial.synth.k[2] << "\n";
    o << "mode_axis = " << solver.initial.synth.axis << "\n";
    o << "\n[analysis]\n";
    o << "ell_list = " << dlist(analysis.ell_list) << "\n";
    o << "p_list = " << dlist(analysis.p_list) << "\n";
    if (analysis.separations.empty()) {
        o << "separations = dyadic\n";
    } else {
        o << "separations = ";
        for (std::size_t i = 0; i < analysis.separations.size(); ++i)
            o << (i ? "," : "") << analysis.separations[i];
        o << "\n";
    }
    o << "directions = " << analysis.directions << "\n";
    o << "fit_r_min = " << format_double(analysis.fit_r_min) << "\n";
    o << "fit_r_max = " << format_double(analysis.fit_r_max) << "\n";
    o << "ell0 = " << format_double(analysis.ell0) << "\n";
    o << "sigma_list = " << dlist(analysis.sigma_list) << "\n";
    o << "mollifier = " << analysis.mollifier << "\n";
    o << "analysis_stride = " << analysis.analysis_stride << "\n";
    o << "epsilon = " << format_double(analysis.epsilon) << "\n";
    o << "consistency_tol = " << format_double(analysis.consistency_tol) << "\n";
    o << "\n[sweep]\n";
    o << "nu_list = " << dlist(sweep.nu_list) << "\n";
    o << "seed_list = ";
    for (std::size_t i = 0; i < sweep.seed_list.size(); ++i)
        o << (i ? "," : "") << sweep.seed_list[i];
    o << "\n";
    o << "\n[output]\n";
    o << "dir = " << output_dir << "\n";
    return o.str();
}

}  // namespace lflx
