#include "crflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <openssl/evp.h>

#include "crflow/errors.hpp"

namespace crflow {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ConfigDocument parse_config(const std::string& text) {
    ConfigDocument doc;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find_first_of("#;");
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3) throw ConfigError("malformed section header", line, s);
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line, s);
        const std::string key = trim(s.substr(0, eq));
        if (key.empty()) throw ConfigError("empty key", line, s);
        if (section.empty()) throw ConfigError("key outside of any section", line, key);
        const std::string full = section + "." + key;
        if (doc.count(full)) throw ConfigError("duplicate key", line, full);
        doc[full] = {trim(s.substr(eq + 1)), line};
    }
    return doc;
}

ConfigDocument load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path, 0, "config");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_override(ConfigDocument& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be section.key=value", 0, assignment);
    const std::string key = trim(assignment.substr(0, eq));
    if (key.find('.') == std::string::npos) throw ConfigError("override key needs a section", 0, key);
    doc[key] = {trim(assignment.substr(eq + 1)), 0};
}

namespace {

class Reader {
  public:
    explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

    void on(const std::string& key, const std::function<void(const std::string&)>& parse) {
        known_.push_back(key);
        auto it = doc_.find(key);
        if (it == doc_.end()) return;
        try {
            parse(it->second.value);
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), it->second.line, key);
        }
    }

    void finish() const {
        for (const auto& [key, entry] : doc_)
            if (std::find(known_.begin(), known_.end(), key) == known_.end())
                throw ConfigError("unknown key", entry.line, key);
    }

  private:
    const ConfigDocument& doc_;
    std::vector<std::string> known_;
};

double to_double(const std::string& v) {
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError("not a number: '" + v + "'");
    return out;
}

long long to_int(const std::string& v) {
    long long out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError("not an integer: '" + v + "'");
    return out;
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw ConfigError("not a boolean: '" + v + "'");
}

std::vector<double> to_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
    return out;
}

double positive(double v) {
    if (!(v > 0.0)) throw ConfigError("must be positive");
    return v;
}

}  // namespace

RunConfig interpret_config(const ConfigDocument& doc, const std::string& subcommand) {
    RunConfig c;
    c.subcommand = subcommand;
    IntegratorConfig& ic = c.integrator;
    EllipticConfig& ec = ic.elliptic;
    Reader r(doc);

    r.on("run.subcommand", [&](const std::string& v) {
        if (v != subcommand) throw ConfigError("config was written for '" + v + "'");
    });
    r.on("run.output", [&](const std::string& v) { c.output = v; });
    r.on("run.seed", [&](const std::string& v) { c.seed = static_cast<std::uint64_t>(to_int(v)); });
    r.on("run.record_every", [&](const std::string& v) {
        c.record_every = static_cast<int>(to_int(v));
        if (c.record_every < 1) throw ConfigError("must be at least 1");
    });
    r.on("run.snapshot_every", [&](const std::string& v) {
        c.snapshot_every = static_cast<int>(to_int(v));
        if (c.snapshot_every < 0) throw ConfigError("must be nonnegative");
    });

    r.on("grid.n", [&](const std::string& v) {
        const auto l = to_list(v);
        if (l.size() == 1) c.grid.n = {int(l[0]), int(l[0]), int(l[0])};
        else if (l.size() == 3) c.grid.n = {int(l[0]), int(l[1]), int(l[2])};
        else throw ConfigError("expected one or three resolutions");
    });
    r.on("grid.period", [&](const std::string& v) {
        const auto l = to_list(v);
        if (l.size() == 1) c.grid.period = {l[0], l[0], l[0]};
        else if (l.size() == 3) c.grid.period = {l[0], l[1], l[2]};
        else throw ConfigError("expected one or three periods");
    });
    r.on("grid.order", [&](const std::string& v) { c.grid.order = static_cast<int>(to_int(v)); });
    r.on("verify.resolutions", [&](const std::string& v) {
        c.verify_resolutions.clear();
        for (double x : to_list(v)) c.verify_resolutions.push_back(static_cast<int>(x));
        if (c.verify_resolutions.size() != 2 || c.verify_resolutions[1] <= c.verify_resolutions[0])
            throw ConfigError("expected two increasing resolutions");
    });

    r.on("metric.preset", [&](const std::string& v) { c.metric_preset = v; });
    r.on("metric.amplitude", [&](const std::string& v) {
        c.metric_amplitude = v == "default" ? 0.0 : positive(to_double(v));
    });
    r.on("metric.input", [&](const std::string& v) { c.metric_input = v; });

    r.on("integrator.dt", [&](const std::string& v) {
        ic.dt = v == "cfl" ? 0.0 : positive(to_double(v));
    });
    r.on("integrator.horizon", [&](const std::string& v) { c.horizon = positive(to_double(v)); });
    r.on("integrator.scheme", [&](const std::string& v) {
        if (v == "lie-trotter") ic.scheme = Scheme::lie_trotter;
        else if (v == "strang") ic.scheme = Scheme::strang;
        else throw ConfigError("expected lie-trotter or strang");
    });
    r.on("integrator.pairing", [&](const std::string& v) {
        if (v == "A") ic.pairing = Pairing::A;
        else if (v == "B") ic.pairing = Pairing::B;
        else throw ConfigError("expected A or B");
    });
    r.on("integrator.method", [&](const std::string& v) {
        if (v == "euler") ic.method = StepMethod::euler;
        else if (v == "rk4") ic.method = StepMethod::rk4;
        else throw ConfigError("expected euler or rk4");
    });
    r.on("integrator.deturck", [&](const std::string& v) { ic.deturck = to_bool(v); });
    r.on("integrator.reprojection", [&](const std::string& v) {
        ic.reprojection_cadence = static_cast<int>(to_int(v));
        if (ic.reprojection_cadence < 0) throw ConfigError("must be nonnegative");
    });
    r.on("integrator.cfl_safety", [&](const std::string& v) { ic.cfl_safety = positive(to_double(v)); });
    r.on("integrator.max_retries", [&](const std::string& v) { ic.max_retries = static_cast<int>(to_int(v)); });
    r.on("integrator.domains", [&](const std::string& v) {
        c.random_domains = static_cast<int>(to_int(v));
        if (c.random_domains < 0) throw ConfigError("must be nonnegative");
    });

    r.on("elliptic.tolerance", [&](const std::string& v) { ec.tolerance = positive(to_double(v)); });
    r.on("elliptic.max_iterations", [&](const std::string& v) {
        ec.max_iterations = static_cast<int>(to_int(v));
        if (ec.max_iterations < 1) throw ConfigError("must be at least 1");
    });
    r.on("elliptic.preconditioner", [&](const std::string& v) {
        if (v == "none") ec.preconditioner = Preconditioner::none;
        else if (v == "diagonal") ec.preconditioner = Preconditioner::diagonal;
        else if (v == "spectral") ec.preconditioner = Preconditioner::spectral;
        else throw ConfigError("expected none, diagonal or spectral");
    });
    r.on("elliptic.drift_warn", [&](const std::string& v) { ec.drift_warn = positive(to_double(v)); });
    r.on("elliptic.drift_abort", [&](const std::string& v) { ec.drift_abort = positive(to_double(v)); });
    r.on("elliptic.constraint_tolerance",
         [&](const std::string& v) { ec.constraint_tolerance = positive(to_double(v)); });

    r.on("homogeneous.model", [&](const std::string& v) { c.model = v; });
    r.on("homogeneous.abc", [&](const std::string& v) {
        const auto l = to_list(v);
        if (l.size() != 3) throw ConfigError("expected A, B, C");
        for (double x : l) positive(x);
        c.abc = {l[0], l[1], l[2]};
    });
    r.on("homogeneous.c", [&](const std::string& v) { c.isotropic_c = positive(to_double(v)); });
    r.on("homogeneous.horizon", [&](const std::string& v) { c.homogeneous_horizon = positive(to_double(v)); });
    r.on("homogeneous.rtol", [&](const std::string& v) { c.rtol = positive(to_double(v)); });
    r.on("homogeneous.ds", [&](const std::string& v) { c.ds = positive(to_double(v)); });
    r.on("homogeneous.renormalize", [&](const std::string& v) { c.renormalize = to_bool(v); });

    r.on("project.kind", [&](const std::string& v) {
        if (v != "tilde" && v != "bar") throw ConfigError("expected tilde or bar");
        c.project_kind = v;
    });
    r.on("project.tensor", [&](const std::string& v) { c.tensor_input = v; });
    r.finish();

    try {
        c.grid.validate();
    } catch (const ConfigError& e) {
        auto it = doc.find(e.field);
        throw ConfigError(e.what(), it == doc.end() ? 0 : it->second.line, e.field);
    }
    if (ec.drift_warn >= ec.drift_abort) {
        auto it = doc.find("elliptic.drift_warn");
        throw ConfigError("drift_warn must be below drift_abort", it == doc.end() ? 0 : it->second.line,
                          "elliptic.drift_warn");
    }
    return c;
}

std::string canonical_config(const RunConfig& c) {
    const IntegratorConfig& ic = c.integrator;
    const EllipticConfig& ec = ic.elliptic;
    std::map<std::string, std::string> kv;
    kv["run.subcommand"] = c.subcommand;
    kv["run.seed"] = std::to_string(c.seed);
    kv["run.record_every"] = std::to_string(c.record_every);
    kv["run.snapshot_every"] = std::to_string(c.snapshot_every);
    kv["grid.n"] = std::to_string(c.grid.n[0]) + "," + std::to_string(c.grid.n[1]) + "," + std::to_string(c.grid.n[2]);
    kv["grid.period"] = fmt(c.grid.period[0]) + "," + fmt(c.grid.period[1]) + "," + fmt(c.grid.period[2]);
    kv["grid.order"] = std::to_string(c.grid.order);
    kv["verify.resolutions"] =
        std::to_string(c.verify_resolutions[0]) + "," + std::to_string(c.verify_resolutions[1]);
    kv["metric.preset"] = c.metric_preset;
    kv["metric.amplitude"] = c.metric_amplitude > 0.0 ? fmt(c.metric_amplitude) : "default";
    kv["metric.input"] = c.metric_input;
    kv["integrator.dt"] = ic.dt > 0.0 ? fmt(ic.dt) : "cfl";
    kv["integrator.horizon"] = fmt(c.horizon);
    kv["integrator.scheme"] = ic.scheme == Scheme::strang ? "strang" : "lie-trotter";
    kv["integrator.pairing"] = ic.pairing == Pairing::A ? "A" : "B";
    kv["integrator.method"] = ic.method == StepMethod::rk4 ? "rk4" : "euler";
    kv["integrator.deturck"] = ic.deturck ? "true" : "false";
    kv["integrator.reprojection"] = std::to_string(ic.reprojection_cadence);
    kv["integrator.cfl_safety"] = fmt(ic.cfl_safety);
    kv["integrator.max_retries"] = std::to_string(ic.max_retries);
    kv["integrator.domains"] = std::to_string(c.random_domains);
    kv["elliptic.tolerance"] = fmt(ec.tolerance);
    kv["elliptic.max_iterations"] = std::to_string(ec.max_iterations);
    kv["elliptic.preconditioner"] = ec.preconditioner == Preconditioner::none       ? "none"
                                    : ec.preconditioner == Preconditioner::diagonal ? "diagonal"
                                                                                     : "spectral";
    kv["elliptic.drift_warn"] = fmt(ec.drift_warn);
    kv["elliptic.drift_abort"] = fmt(ec.drift_abort);
    kv["elliptic.constraint_tolerance"] = fmt(ec.constraint_tolerance);
    kv["homogeneous.model"] = c.model;
    kv["homogeneous.abc"] = fmt(c.abc[0]) + "," + fmt(c.abc[1]) + "," + fmt(c.abc[2]);
    kv["homogeneous.c"] = fmt(c.isotropic_c);
    kv["homogeneous.horizon"] = fmt(c.homogeneous_horizon);
    kv["homogeneous.rtol"] = fmt(c.rtol);
    kv["homogeneous.ds"] = fmt(c.ds);
    kv["homogeneous.renormalize"] = c.renormalize ? "true" : "false";
    kv["project.kind"] = c.project_kind;
    kv["project.tensor"] = c.tensor_input;
    std::string out;
    std::string section;
    for (const auto& [k, v] : kv) {
        const auto dot = k.find('.');
        if (k.substr(0, dot) != section) {
            section = k.substr(0, dot);
            out += (out.empty() ? "[" : "\n[") + section + "]\n";
        }
        out += k.substr(dot + 1) + " = " + v + "\n";
    }
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

}  // namespace crflow
