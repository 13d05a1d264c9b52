#include "novlab/config.hpp"

#include "novlab/errors.hpp"
#include "novlab/field_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace novlab {

Limiter ExperimentConfig::limiter() const {
    if (evolve_limiter == "upwind1") return Limiter::upwind1;
    if (evolve_limiter == "weno3") return Limiter::weno3;
    throw ConfigError("evolve.limiter: expected upwind1 or weno3, got '" + evolve_limiter + "'");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_num(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
    std::int64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    return out;
}

std::vector<double> parse_num_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_num(key, trim(item)));
    return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<std::int64_t> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_int(key, trim(item)));
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

std::string join(const std::vector<std::int64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));

        if (key == "experiment") cfg.experiment = val;
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, val));
        else if (key == "out_dir") cfg.out_dir = val;
        else if (key == "grid.x_left") cfg.grid_x_left = parse_num(key, val);
        else if (key == "grid.dx") cfg.grid_dx = parse_num(key, val);
        else if (key == "grid.n") cfg.grid_n = parse_int(key, val);
        else if (key == "init.kind") cfg.init_kind = val;
        else if (key == "init.c") cfg.init_c = parse_num(key, val);
        else if (key == "init.x0") cfg.init_x0 = parse_num(key, val);
        else if (key == "init.bump_amp") cfg.init_bump_amp = parse_num(key, val);
        else if (key == "init.bump_center") cfg.init_bump_center = parse_num(key, val);
        else if (key == "init.bump_width") cfg.init_bump_width = parse_num(key, val);
        else if (key == "init.q") cfg.init_q = parse_num_list(key, val);
        else if (key == "init.p") cfg.init_p = parse_num_list(key, val);
        else if (key == "init.file") cfg.init_file = val;
        else if (key == "evolve.cfl") cfg.evolve_cfl = parse_num(key, val);
        else if (key == "evolve.t_end") cfg.evolve_t_end = parse_num(key, val);
        else if (key == "evolve.snapshot_every") cfg.evolve_snapshot_every = parse_num(key, val);
        else if (key == "evolve.limiter") cfg.evolve_limiter = val;
        else if (key == "mp.t_end") cfg.mp_t_end = parse_num(key, val);
        else if (key == "mp.rtol") cfg.mp_rtol = parse_num(key, val);
        else if (key == "mp.gap_floor") cfg.mp_gap_floor = parse_num(key, val);
        else if (key == "mp.sample_every") cfg.mp_sample_every = parse_num(key, val);
        else if (key == "modulation.n0_candidates")
            cfg.modulation_n0_candidates = parse_int_list(key, val);
        else if (key == "modulation.sigma") cfg.modulation_sigma = parse_num(key, val);
        else if (key == "modulation.window_A") cfg.modulation_window_A = parse_num(key, val);
        else if (key == "modulation.guess") cfg.modulation_guess = parse_num(key, val);
        else if (key == "windows.R_list") cfg.windows_R_list = parse_num_list(key, val);
        else if (key == "windows.z_rate") cfg.windows_z_rate = parse_num(key, val);
        else if (key == "windows.t0") cfg.windows_t0 = parse_num(key, val);
        else if (key == "front.gamma_fracs") cfg.front_gamma_fracs = parse_num_list(key, val);
        else if (key == "front.delta") cfg.front_delta = parse_num(key, val);
        else if (key == "edge.rel_threshold") cfg.edge_rel_threshold = parse_num(key, val);
        else if (key == "sweep.dx_list") cfg.sweep_dx_list = parse_num_list(key, val);
        else if (key == "sweep.metric") cfg.sweep_metric = val;
        else throw ConfigError("unknown configuration key '" + key + "'");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "experiment = " << c.experiment << '\n';
    o << "seed = " << c.seed << '\n';
    o << "out_dir = " << c.out_dir << '\n';
    o << "grid.x_left = " << format_double(c.grid_x_left) << '\n';
    o << "grid.dx = " << format_double(c.grid_dx) << '\n';
    o << "grid.n = " << c.grid_n << '\n';
    o << "init.kind = " << c.init_kind << '\n';
    o << "init.c = " << format_double(c.init_c) << '\n';
    o << "init.x0 = " << format_double(c.init_x0) << '\n';
    o << "init.bump_amp = " << format_double(c.init_bump_amp) << '\n';
    o << "init.bump_center = " << format_double(c.init_bump_center) << '\n';
    o << "init.bump_width = " << format_double(c.init_bump_width) << '\n';
    o << "init.q = " << join(c.init_q) << '\n';
    o << "init.p = " << join(c.init_p) << '\n';
    o << "init.file = " << c.init_file << '\n';
    o << "evolve.cfl = " << format_double(c.evolve_cfl) << '\n';
    o << "evolve.t_end = " << format_double(c.evolve_t_end) << '\n';
    o << "evolve.snapshot_every = " << format_double(c.evolve_snapshot_every) << '\n';
    o << "evolve.limiter = " << c.evolve_limiter << '\n';
    o << "mp.t_end = " << format_double(c.mp_t_end) << '\n';
    o << "mp.rtol = " << format_double(c.mp_rtol) << '\n';
    o << "mp.gap_floor = " << format_double(c.mp_gap_floor) << '\n';
    o << "mp.sample_every = " << format_double(c.mp_sample_every) << '\n';
    o << "modulation.n0_candidates = " << join(c.modulation_n0_candidates) << '\n';
    o << "modulation.sigma = " << format_double(c.modulation_sigma) << '\n';
    o << "modulation.window_A = " << format_double(c.modulation_window_A) << '\n';
    o << "modulation.guess = " << format_double(c.modulation_guess) << '\n';
    o << "windows.R_list = " << join(c.windows_R_list) << '\n';
    o << "windows.z_rate = " << format_double(c.windows_z_rate) << '\n';
    o << "windows.t0 = " << format_double(c.windows_t0) << '\n';
    o << "front.gamma_fracs = " << join(c.front_gamma_fracs) << '\n';
    o << "front.delta = " << format_double(c.front_delta) << '\n';
    o << "edge.rel_threshold = " << format_double(c.edge_rel_threshold) << '\n';
    o << "sweep.dx_list = " << join(c.sweep_dx_list) << '\n';
    o << "sweep.metric = " << c.sweep_metric << '\n';
    return o.str();
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << serialize_config(cfg);
    if (!out) throw Error("write failed: " + path);
}

} // namespace novlab
