#include "aerosurvey/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace aerosurvey {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Reads the keys of one JSON object and rejects the ones nobody asked for.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError((path_.empty() ? "config" : path_) + ": expected an object");
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = node_.find(key);
        return it == node_.end() || it->is_null() ? nullptr : &*it;
    }

    bool number(const std::string& key, double& out) {
        const json* v = find(key);
        if (!v) return false;
        if (!v->is_number()) throw ConfigError(join(path_, key) + ": expected a number");
        out = v->get<double>();
        return true;
    }

    bool count(const std::string& key, std::size_t& out, std::int64_t min_value) {
        const json* v = find(key);
        if (!v) return false;
        if (!v->is_number_integer()) throw ConfigError(join(path_, key) + ": expected an integer");
        const auto value = v->get<std::int64_t>();
        if (value < min_value)
            throw ConfigError(join(path_, key) + " must be >= " + std::to_string(min_value));
        out = static_cast<std::size_t>(value);
        return true;
    }

    bool text(const std::string& key, std::string& out) {
        const json* v = find(key);
        if (!v) return false;
        if (!v->is_string()) throw ConfigError(join(path_, key) + ": expected a string");
        out = v->get<std::string>();
        return true;
    }

    template <std::size_t N>
    bool vec(const std::string& key, std::array<double, N>& out) {
        const json* v = find(key);
        if (!v) return false;
        if (!v->is_array() || v->size() != N)
            throw ConfigError(join(path_, key) + ": expected an array of " + std::to_string(N) + " numbers");
        for (std::size_t i = 0; i < N; ++i) {
            if (!(*v)[i].is_number()) throw ConfigError(join(path_, key) + ": expected numbers");
            out[i] = (*v)[i].get<double>();
        }
        return true;
    }

    std::string path(const std::string& key) const { return join(path_, key); }

    void finish() const {
        for (const auto& [key, value] : node_.items())
            if (!seen_.contains(key)) throw ConfigError("unknown key '" + join(path_, key) + "'");
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class F>
auto named(const std::string& field, F&& parse) {
    try {
        return parse();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field + ": " + e.what());
    }
}

void read_grid(Section& root, GridSpec& grid) {
    const json* node = root.find("grid");
    if (!node) return;
    Section s(*node, "grid");
    s.count("rows", grid.rows, 1);
    s.count("cols", grid.cols, 1);
    s.number("spacing", grid.spacing);
    s.number("altitude", grid.altitude);
    std::array<double, 2> origin{};
    if (s.vec("origin", origin)) grid.origin = {origin[0], origin[1]};
    s.finish();
}

void read_channel(Section& root, SurveyConfig& config) {
    const json* node = root.find("channel");
    if (!node) return;
    Section s(*node, "channel");
    auto& ch = config.channel;
    auto& placement = *config.random_transmitters;
    s.count("num_transmitters", placement.count, 1);
    s.number("tx_height", placement.height);
    s.number("tx_power", placement.power_dbm);
    s.number("frequency", ch.frequency);
    s.number("pathloss_exponent", ch.pathloss_exponent);
    s.number("shadow_var", ch.shadow_var);
    s.number("shadow_mean", ch.shadow_mean);
    s.number("corr_distance", ch.corr_distance);
    s.number("fading_var", ch.fading_var);
    s.number("noise_var", ch.noise_var);
    if (const json* list = s.find("transmitters")) {
        if (!list->is_array()) throw ConfigError("channel.transmitters: expected an array");
        for (std::size_t i = 0; i < list->size(); ++i) {
            Section tx((*list)[i], "channel.transmitters[" + std::to_string(i) + "]");
            Transmitter t;
            t.power_dbm = placement.power_dbm;
            std::array<double, 3> pos{};
            if (!tx.vec("position", pos)) throw ConfigError(tx.path("position") + ": required");
            t.position = {pos[0], pos[1], pos[2]};
            tx.number("power", t.power_dbm);
            tx.finish();
            ch.transmitters.push_back(t);
        }
        config.random_transmitters.reset();
    }
    s.finish();
}

void read_stop(Section& root, StopRule& stop) {
    const json* node = root.find("stop");
    if (!node) return;
    Section s(*node, "stop");
    std::size_t max = 0;
    const bool has_max = s.count("max_measurements", max, 0);
    double threshold = 0.0;
    const bool has_threshold = s.number("uncertainty_threshold", threshold);
    if (has_max || has_threshold) {
        stop.max_measurements = has_max ? std::optional<std::size_t>(max) : std::nullopt;
        stop.uncertainty_threshold = has_threshold ? std::optional<double>(threshold) : std::nullopt;
    }
    s.finish();
}

std::size_t line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

}  // namespace

Aggregation parse_aggregation(std::string_view name) {
    if (name == "max") return Aggregation::max;
    if (name == "mean") return Aggregation::mean;
    throw std::invalid_argument("unknown aggregation '" + std::string(name) + "'");
}

MapKind parse_map_kind(std::string_view name) {
    if (name == "power") return MapKind::power;
    if (name == "service") return MapKind::service;
    throw std::invalid_argument("unknown target '" + std::string(name) + "'");
}

ShortestPathEngine parse_engine(std::string_view name) {
    if (name == "dijkstra") return ShortestPathEngine::dijkstra;
    if (name == "bellman_ford") return ShortestPathEngine::bellman_ford;
    throw std::invalid_argument("unknown shortest-path engine '" + std::string(name) + "'");
}

SurveyConfig parse_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("parse error at line " + std::to_string(line_of(json_text, e.byte)) + ": " + e.what());
    }

    SurveyConfig config;
    Section root(doc, "");
    read_grid(root, config.grid);
    read_channel(root, config);
    read_stop(root, config.stop);
    root.number("r_min", config.r_min);
    root.number("measurement_spacing", config.measurement_spacing);
    root.number("speed", config.speed);
    std::string name;
    if (root.text("planner", name)) config.planner = named("planner", [&] { return parse_planner(name); });
    if (root.text("aggregation", name)) config.aggregation = named("aggregation", [&] { return parse_aggregation(name); });
    if (root.text("target", name)) config.target = named("target", [&] { return parse_map_kind(name); });
    if (root.text("shortest_path", name))
        config.shortest_path = named("shortest_path", [&] { return parse_engine(name); });
    std::array<double, 2> start{};
    if (root.vec("start", start)) config.start = Point2{start[0], start[1]};
    if (const json* seed = root.find("seed")) {
        if (!seed->is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
        config.seed = seed->get<std::uint64_t>();
    }
    root.finish();

    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return config;
}

SurveyConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace aerosurvey
