#include "etesc/scenario.hpp"

#include "etesc/rational.hpp"

#include <json.hpp>

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace etesc {

namespace {

using nlohmann::json;

struct Entry {
    std::string raw;
    int line = 0;
};

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "name",
        "map.hessian", "map.optimizer", "map.extremum",
        "dither.amplitudes", "dither.freq_ratios", "dither.base_freq", "dither.max_denominator",
        "gain.K",
        "trigger.kind", "trigger.sigma", "trigger.alpha", "trigger.beta", "trigger.mu", "trigger.gamma",
        "trigger.upsilon0", "trigger.h",
        "frontend.washout", "frontend.lowpass",
        "sim.theta_hat0", "sim.duration", "sim.dt", "sim.mode",
        "output.decimation", "output.trajectory", "output.events", "output.stats",
        "certificate.Q", "certificate.kappa",
        "checks.window", "checks.ball", "checks.theta_hat_tol", "checks.y_tol", "checks.residual_c",
        "checks.max_events_window",
        "campaign.sigmas", "campaign.initial_conditions", "campaign.circle_center", "campaign.circle_radius",
        "campaign.circle_points", "campaign.circle_stride", "campaign.jobs",
    };
    return keys;
}

class Reader {
public:
    Reader(std::map<std::string, Entry> entries, std::vector<std::string>& errors)
        : entries_(std::move(entries)), errors_(errors) {}

    [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) != 0; }

    void error(const std::string& key, const std::string& msg) {
        const auto it = entries_.find(key);
        if (it != entries_.end()) {
            errors_.push_back(fmt::format("line {}: {}: {}", it->second.line, key, msg));
        } else {
            errors_.push_back(fmt::format("{}: {}", key, msg));
        }
    }

    std::optional<json> value(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) {
            return std::nullopt;
        }
        const std::string& raw = it->second.raw;
        if (!raw.empty() && (raw.front() == '[' || raw.front() == '"' || raw.front() == '-' ||
                             raw.front() == '.' || std::isdigit(static_cast<unsigned char>(raw.front())))) {
            try {
                return json::parse(raw);
            } catch (const json::exception& ex) {
                error(key, fmt::format("cannot parse '{}': {}", raw, ex.what()));
                return json();
            }
        }
        return json(raw);
    }

    std::optional<double> number(const std::string& key, bool required = false) {
        const auto v = value(key);
        if (!v) {
            if (required) {
                error(key, "missing required key");
            }
            return std::nullopt;
        }
        if (v->is_null()) {
            return std::nullopt;
        }
        if (!v->is_number()) {
            error(key, "expected a number");
            return std::nullopt;
        }
        return v->get<double>();
    }

    std::optional<std::string> word(const std::string& key) {
        const auto v = value(key);
        if (!v || v->is_null()) {
            return std::nullopt;
        }
        if (v->is_string()) {
            return v->get<std::string>();
        }
        return v->dump();
    }

    std::optional<Vector> vector(const std::string& key, bool required = false) {
        const auto v = value(key);
        if (!v) {
            if (required) {
                error(key, "missing required key");
            }
            return std::nullopt;
        }
        if (v->is_null()) {
            return std::nullopt;
        }
        return to_vector(key, *v);
    }

    std::optional<Vector> to_vector(const std::string& key, const json& v) {
        if (!v.is_array() || v.empty()) {
            error(key, "expected a nonempty vector [x, y, ...]");
            return std::nullopt;
        }
        if (v.size() > static_cast<std::size_t>(kMaxDim)) {
            error(key, fmt::format("vector longer than {} entries", kMaxDim));
            return std::nullopt;
        }
        Vector out(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) {
                error(key, fmt::format("entry {} is not a number", i));
                return std::nullopt;
            }
            out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
        }
        return out;
    }

    std::optional<Matrix> matrix(const std::string& key, bool required = false) {
        const auto v = value(key);
        if (!v) {
            if (required) {
                error(key, "missing required key");
            }
            return std::nullopt;
        }
        if (v->is_null()) {
            return std::nullopt;
        }
        if (v->is_number()) {
            Matrix m(1, 1);
            m(0, 0) = v->get<double>();
            return m;
        }
        if (!v->is_array() || v->empty() || !(*v)[0].is_array()) {
            error(key, "expected a matrix [[row], [row], ...]");
            return std::nullopt;
        }
        const std::size_t rows = v->size();
        const std::size_t cols = (*v)[0].size();
        if (rows > static_cast<std::size_t>(kMaxDim) || cols > static_cast<std::size_t>(kMaxDim) || cols == 0) {
            error(key, fmt::format("matrix size must be between 1 and {}", kMaxDim));
            return std::nullopt;
        }
        Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (std::size_t r = 0; r < rows; ++r) {
            const json& row = (*v)[r];
            if (!row.is_array() || row.size() != cols) {
                error(key, fmt::format("row {} does not have {} entries", r, cols));
                return std::nullopt;
            }
            for (std::size_t c = 0; c < cols; ++c) {
                if (!row[c].is_number()) {
                    error(key, fmt::format("entry ({}, {}) is not a number", r, c));
                    return std::nullopt;
                }
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
            }
        }
        return m;
    }

    std::optional<std::vector<Rational>> ratios(const std::string& key, std::int64_t max_den) {
        const auto v = value(key);
        if (!v) {
            error(key, "missing required key");
            return std::nullopt;
        }
        if (!v->is_array() || v->empty()) {
            error(key, "expected a nonempty list of ratios");
            return std::nullopt;
        }
        std::vector<Rational> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            const json& item = (*v)[i];
            try {
                if (item.is_number_integer()) {
                    out.emplace_back(item.get<std::int64_t>());
                } else if (item.is_number()) {
                    out.push_back(rationalize(item.get<double>(), max_den));
                } else if (item.is_string()) {
                    out.push_back(parse_fraction(item.get<std::string>()));
                } else {
                    error(key, fmt::format("entry {} must be a number or a \"p/q\" string", i));
                    return std::nullopt;
                }
            } catch (const ConfigError& ex) {
                error(key, fmt::format("entry {}: {}", i, ex.what()));
                return std::nullopt;
            }
        }
        return out;
    }

    std::vector<std::string> unknown_keys() const {
        std::vector<std::string> out;
        for (const auto& [key, entry] : entries_) {
            if (known_keys().count(key) == 0) {
                out.push_back(fmt::format("line {}: {}: unknown key", entry.line, key));
            }
        }
        return out;
    }

private:
    static Rational parse_fraction(const std::string& text) {
        const auto slash = text.find('/');
        try {
            std::size_t used = 0;
            if (slash == std::string::npos) {
                const long long n = std::stoll(text, &used);
                if (used != text.size()) {
                    throw std::invalid_argument(text);
                }
                return Rational(n);
            }
            const std::string a = text.substr(0, slash);
            const std::string b = text.substr(slash + 1);
            const long long n = std::stoll(a, &used);
            if (used != a.size()) {
                throw std::invalid_argument(text);
            }
            const long long d = std::stoll(b, &used);
            if (used != b.size()) {
                throw std::invalid_argument(text);
            }
            return Rational(n, d);
        } catch (const std::logic_error&) {
            throw ConfigError(fmt::format("'{}' is not an integer fraction p/q", text));
        }
    }

    std::map<std::string, Entry> entries_;
    std::vector<std::string>& errors_;
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::map<std::string, Entry> tokenize(const std::string& text, std::vector<std::string>& errors) {
    std::map<std::string, Entry> entries;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back(fmt::format("line {}: expected 'key = value'", number));
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            errors.push_back(fmt::format("line {}: empty key or value", number));
            continue;
        }
        if (entries.count(key) != 0) {
            errors.push_back(fmt::format("line {}: {}: duplicate key (first set on line {})", number, key,
                                         entries[key].line));
            continue;
        }
        entries[key] = Entry{value, number};
    }
    return entries;
}

template <typename Fn>
auto attempt(std::vector<std::string>& errors, const std::string& field, Fn&& fn) -> std::optional<decltype(fn())> {
    try {
        return fn();
    } catch (const ConfigError& ex) {
        errors.push_back(fmt::format("{}: {}", field, ex.what()));
    } catch (const CertificateError& ex) {
        errors.push_back(fmt::format("{}: {}", field, ex.what()));
    }
    return std::nullopt;
}

}  // namespace

std::vector<Vector> circle_initial_conditions(const Vector& center, double radius, int points, int stride) {
    if (center.size() != 2 || points < 1 || stride < 1) {
        throw ConfigError("circle initial conditions need a 2-vector center, points >= 1 and stride >= 1");
    }
    std::vector<Vector> out;
    for (int i = stride; i <= points; i += stride) {
        const double angle = 2.0 * std::numbers::pi * i / points;
        Vector p(2);
        p << center(0) - radius * std::cos(angle), center(1) - radius * std::sin(angle);
        out.push_back(p);
    }
    return out;
}

Scenario parse_scenario(const std::string& text, const std::string& origin, const Overrides& overrides) {
    std::vector<std::string> errors;
    Reader r(tokenize(text, errors), errors);
    for (auto& msg : r.unknown_keys()) {
        errors.push_back(std::move(msg));
    }

    // Map.
    const auto hessian = r.matrix("map.hessian", true);
    const auto optimizer = r.vector("map.optimizer", true);
    const auto extremum = r.number("map.extremum", true);
    std::optional<QuadraticMap> map;
    if (hessian && optimizer && extremum) {
        map = attempt(errors, "map", [&] { return QuadraticMap(*hessian, *optimizer, *extremum); });
    }

    // Dither.
    const double max_den = r.number("dither.max_denominator").value_or(1e6);
    const auto amplitudes = r.vector("dither.amplitudes", true);
    const auto ratios = r.ratios("dither.freq_ratios", static_cast<std::int64_t>(max_den));
    const auto base = r.number("dither.base_freq", true);
    std::optional<DitherSpec> dither;
    if (amplitudes && ratios && base) {
        dither = attempt(errors, "dither", [&] { return DitherSpec(*amplitudes, *ratios, *base); });
    }

    // Gain.
    std::optional<ControllerGain> gain;
    if (const auto k = r.matrix("gain.K", true)) {
        gain = attempt(errors, "gain.K", [&] { return ControllerGain(*k); });
    }

    // Trigger.
    TriggerConfig trig;
    if (const auto kind = r.word("trigger.kind")) {
        try {
            trig.kind = parse_trigger_kind(*kind);
        } catch (const ConfigError& ex) {
            r.error("trigger.kind", ex.what());
        }
    }
    if (overrides.trigger) {
        trig.kind = *overrides.trigger;
    }
    trig.sigma = r.number("trigger.sigma", true).value_or(trig.sigma);
    trig.alpha = r.number("trigger.alpha", true).value_or(trig.alpha);
    trig.beta = r.number("trigger.beta", true).value_or(trig.beta);
    trig.mu = r.number("trigger.mu").value_or(0.0);
    trig.gamma = r.number("trigger.gamma").value_or(0.0);
    trig.upsilon0 = r.number("trigger.upsilon0").value_or(0.0);
    trig.h = r.number("trigger.h").value_or(0.0);

    FrontEnd frontend;
    frontend.washout = r.number("frontend.washout").value_or(0.0);
    frontend.lowpass = r.number("frontend.lowpass").value_or(0.0);

    SimMode mode = SimMode::Full;
    if (const auto m = r.word("sim.mode")) {
        try {
            mode = parse_sim_mode(*m);
        } catch (const ConfigError& ex) {
            r.error("sim.mode", ex.what());
        }
    }
    if (overrides.mode) {
        mode = *overrides.mode;
    }
    const auto theta_hat0 = r.vector("sim.theta_hat0", true);
    const double duration = r.number("sim.duration", true).value_or(0.0);
    std::optional<double> dt_requested;
    if (const auto dt_word = r.word("sim.dt"); dt_word && *dt_word != "auto") {
        dt_requested = r.number("sim.dt");
    }
    const double decimation_value = r.number("output.decimation").value_or(1.0);
    if (decimation_value != std::floor(decimation_value) || decimation_value < 1.0) {
        r.error("output.decimation", "must be a positive integer");
    }

    const std::optional<Matrix> cert_q = r.matrix("certificate.Q");
    const auto kappa = r.number("certificate.kappa");

    Checks checks;
    checks.window = r.number("checks.window").value_or(checks.window);
    checks.ball = r.number("checks.ball").value_or(checks.ball);
    checks.theta_hat_tol = r.number("checks.theta_hat_tol");
    checks.y_tol = r.number("checks.y_tol");
    checks.residual_c = r.number("checks.residual_c");
    checks.max_events_window = r.number("checks.max_events_window").value_or(checks.max_events_window);

    std::optional<Campaign> campaign;
    if (r.has("campaign.sigmas")) {
        Campaign c;
        if (const auto s = r.vector("campaign.sigmas")) {
            c.sigmas.assign(s->data(), s->data() + s->size());
            for (double sigma : c.sigmas) {
                if (!(sigma > 0.0 && sigma < 1.0)) {
                    r.error("campaign.sigmas", fmt::format("{} is outside (0,1)", sigma));
                }
            }
        }
        if (r.has("campaign.initial_conditions")) {
            if (const auto m = r.matrix("campaign.initial_conditions")) {
                for (Eigen::Index i = 0; i < m->rows(); ++i) {
                    c.initial_conditions.emplace_back(m->row(i).transpose());
                }
            }
        } else if (r.has("campaign.circle_center")) {
            const auto center = r.vector("campaign.circle_center");
            const auto radius = r.number("campaign.circle_radius", true);
            const auto points = r.number("campaign.circle_points", true);
            const double stride = r.number("campaign.circle_stride").value_or(1.0);
            if (center && radius && points) {
                try {
                    c.initial_conditions = circle_initial_conditions(*center, *radius, static_cast<int>(*points),
                                                                     static_cast<int>(stride));
                } catch (const ConfigError& ex) {
                    r.error("campaign.circle_center", ex.what());
                }
            }
        } else {
            r.error("campaign.initial_conditions", "campaign needs initial_conditions or a circle_center");
        }
        c.jobs = static_cast<int>(r.number("campaign.jobs").value_or(1.0));
        if (overrides.jobs) {
            c.jobs = *overrides.jobs;
        }
        if (c.jobs < 1) {
            r.error("campaign.jobs", "must be >= 1");
        }
        campaign = std::move(c);
    }

    std::vector<std::string> notes;
    if (!map || !dither || !gain || !theta_hat0) {
        if (errors.empty()) {
            errors.push_back("scenario is incomplete");
        }
    } else {
        double dt = dt_requested.value_or(default_dt(*dither));
        if (is_periodic(trig.kind) && trig.h > 0.0 && dt > 0.0) {
            const double aligned = align_dt_to_period(dt, trig.h);
            if (aligned != dt) {
                notes.push_back(fmt::format("sim.dt adjusted from {:.9g} to {:.9g} so that trigger.h = {:.9g} is "
                                            "an integer number of steps",
                                            dt, aligned, trig.h));
                dt = aligned;
            }
        }
        const int n = map->dim();
        SimConfig sim{*map, *dither, *gain, trig, *theta_hat0};
        sim.duration = duration;
        sim.dt = dt;
        sim.mode = mode;
        sim.frontend = frontend;
        sim.decimation = static_cast<int>(std::max(1.0, decimation_value));
        sim.lyapunov_q = cert_q.value_or(Matrix::Identity(n, n));
        for (auto& msg : sim.problems()) {
            errors.push_back(std::move(msg));
        }
        if (campaign) {
            for (std::size_t i = 0; i < campaign->initial_conditions.size(); ++i) {
                if (campaign->initial_conditions[i].size() != n) {
                    errors.push_back(fmt::format("campaign.initial_conditions: entry {} has dimension {}, expected {}",
                                                 i, campaign->initial_conditions[i].size(), n));
                }
            }
            if (!(trig.mu > 0.0) || !(trig.gamma > 0.0)) {
                errors.push_back("campaign: trigger.mu and trigger.gamma must be positive for the dynamic runs");
            }
        }
        if (errors.empty()) {
            Scenario sc{.name = r.word("name").value_or(origin), .sim = std::move(sim)};
            sc.certificate_q = sc.sim.lyapunov_q;
            sc.kappa = kappa;
            sc.checks = checks;
            sc.campaign = std::move(campaign);
            sc.trajectory_file = r.word("output.trajectory").value_or(sc.trajectory_file);
            sc.events_file = r.word("output.events").value_or(sc.events_file);
            sc.stats_file = r.word("output.stats").value_or(sc.stats_file);
            sc.notes = std::move(notes);
            return sc;
        }
    }
    std::string message = fmt::format("{}: invalid scenario", origin);
    for (const auto& e : errors) {
        message += "\n  " + e;
    }
    throw ConfigError(message);
}

Scenario load_scenario(const std::string& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open scenario file '{}'", path));
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path, overrides);
}

}  // namespace etesc
