#include "trackmode/config.hpp"

#include <istream>
#include <ostream>

#include "trackmode/error.hpp"
#include "trackmode/textio.hpp"

namespace trackmode {

const char* discretization_kind_name(DiscretizationKind k) {
    switch (k) {
    case DiscretizationKind::width: return "width";
    case DiscretizationKind::entropy: return "entropy";
    case DiscretizationKind::fuzzy: return "fuzzy";
    }
    return "?";
}

bool parse_discretization_kind(const std::string& name, DiscretizationKind& out) {
    if (name == "width") out = DiscretizationKind::width;
    else if (name == "entropy") out = DiscretizationKind::entropy;
    else if (name == "fuzzy") out = DiscretizationKind::fuzzy;
    else return false;
    return true;
}

std::vector<std::string> PipelineConfig::feature_names() const {
    static const char* names[] = {"v_p", "v_avg", "v_sd"};
    std::vector<std::string> out;
    for (size_t f = 0; f < feature_count; ++f) out.push_back(names[f]);
    return out;
}

void PipelineConfig::validate() const {
    if (feature_count < 1 || feature_count > 3)
        throw ConfigError("feature_count must be 1, 2 or 3");
    if (bins < 1) throw ConfigError("bins must be >= 1");
    if (!(fuzzy_overlap > 0.0 && fuzzy_overlap < 0.5))
        throw ConfigError("fuzzy_overlap must be in (0, 0.5)");
    if (!(segmentation.parameter > 0.0)) throw ConfigError("segmentation parameter must be > 0");
    if (hidden < 1 || layers < 1 || pieces < 1)
        throw ConfigError("network sizes must be >= 1");
    if (input == InputKind::embedded && embedding_dim < 1)
        throw ConfigError("embedding_dim must be >= 1");
    if (cell == CellKind::gru && pieces != 1)
        throw ConfigError("gru cell requires pieces = 1");
    if (eval_window < 1) throw ConfigError("eval_window must be >= 1");
    try {
        train.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::to_kv() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("class_set", std::to_string(static_cast<int>(class_set)));
    kv.emplace_back("segmentation.kind", segmentation_kind_name(segmentation.kind));
    kv.emplace_back("segmentation.parameter", format_double(segmentation.parameter));
    kv.emplace_back("hampel.enabled", hampel.enabled ? "true" : "false");
    kv.emplace_back("hampel.half_width", std::to_string(hampel.window_half_width));
    kv.emplace_back("hampel.n_mad", format_double(hampel.n_mad));
    kv.emplace_back("feature_count", std::to_string(feature_count));
    kv.emplace_back("discretization", discretization_kind_name(discretization));
    kv.emplace_back("bins", std::to_string(bins));
    kv.emplace_back("fuzzy_overlap", format_double(fuzzy_overlap));
    kv.emplace_back("embedding_dim", std::to_string(embedding_dim));
    kv.emplace_back("hidden", std::to_string(hidden));
    kv.emplace_back("layers", std::to_string(layers));
    kv.emplace_back("pieces", std::to_string(pieces));
    kv.emplace_back("cell", cell_kind_name(cell));
    kv.emplace_back("input", input_kind_name(input));
    kv.emplace_back("init_seed", std::to_string(init_seed));
    kv.emplace_back("train.learning_rate", format_double(train.learning_rate));
    kv.emplace_back("train.beta1", format_double(train.beta1));
    kv.emplace_back("train.beta2", format_double(train.beta2));
    kv.emplace_back("train.adam_epsilon", format_double(train.adam_epsilon));
    kv.emplace_back("train.chunk_length", std::to_string(train.chunk_length));
    kv.emplace_back("train.batch_size", std::to_string(train.batch_size));
    kv.emplace_back("train.max_epochs", std::to_string(train.max_epochs));
    kv.emplace_back("train.patience", std::to_string(train.patience));
    kv.emplace_back("train.grad_clip", format_double(train.grad_clip));
    kv.emplace_back("train.seed", std::to_string(train.seed));
    kv.emplace_back("split.train", std::to_string(split_sizes.n_train));
    kv.emplace_back("split.validation", std::to_string(split_sizes.n_validation));
    kv.emplace_back("split.test", std::to_string(split_sizes.n_test));
    kv.emplace_back("split.seed", std::to_string(split_seed));
    kv.emplace_back("split.candidates", std::to_string(split_candidates));
    kv.emplace_back("eval_window", std::to_string(eval_window));
    kv.emplace_back("synth.persons", std::to_string(synth_persons));
    kv.emplace_back("synth.points", std::to_string(synth_points));
    kv.emplace_back("synth.interval_s", format_double(synth_interval_s));
    kv.emplace_back("synth.dwell", format_double(synth_dwell));
    kv.emplace_back("synth.seed", std::to_string(synth_seed));
    return kv;
}

namespace {

uint64_t parse_u64(const std::string& key, const std::string& value) {
    long long x;
    if (!try_parse_int(value, x) || x < 0)
        throw ConfigError("config: " + key + " expects a non-negative integer, got '" + value + "'");
    return static_cast<uint64_t>(x);
}

double parse_real(const std::string& key, const std::string& value) {
    double x;
    if (!try_parse_double(value, x))
        throw ConfigError("config: " + key + " expects a number, got '" + value + "'");
    return x;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config: " + key + " expects true/false, got '" + value + "'");
}

} // namespace

void PipelineConfig::apply(const std::string& key, const std::string& value) {
    if (key == "class_set") {
        uint64_t v = parse_u64(key, value);
        if (v == 4) class_set = ClassSet::four;
        else if (v == 7) class_set = ClassSet::seven;
        else throw ConfigError("config: class_set must be 4 or 7");
    } else if (key == "segmentation.kind") {
        if (!parse_segmentation_kind(value, segmentation.kind))
            throw ConfigError("config: unknown segmentation kind '" + value + "'");
    } else if (key == "segmentation.parameter") {
        segmentation.parameter = parse_real(key, value);
    } else if (key == "hampel.enabled") {
        hampel.enabled = parse_bool(key, value);
    } else if (key == "hampel.half_width") {
        hampel.window_half_width = parse_u64(key, value);
    } else if (key == "hampel.n_mad") {
        hampel.n_mad = parse_real(key, value);
    } else if (key == "feature_count") {
        feature_count = parse_u64(key, value);
    } else if (key == "discretization") {
        if (!parse_discretization_kind(value, discretization))
            throw ConfigError("config: unknown discretization '" + value + "'");
    } else if (key == "bins") {
        bins = parse_u64(key, value);
    } else if (key == "fuzzy_overlap") {
        fuzzy_overlap = parse_real(key, value);
    } else if (key == "embedding_dim") {
        embedding_dim = parse_u64(key, value);
    } else if (key == "hidden") {
        hidden = parse_u64(key, value);
    } else if (key == "layers") {
        layers = parse_u64(key, value);
    } else if (key == "pieces") {
        pieces = parse_u64(key, value);
    } else if (key == "cell") {
        if (!parse_cell_kind(value, cell))
            throw ConfigError("config: unknown cell kind '" + value + "'");
    } else if (key == "input") {
        if (!parse_input_kind(value, input))
            throw ConfigError("config: unknown input kind '" + value + "'");
    } else if (key == "init_seed") {
        init_seed = parse_u64(key, value);
    } else if (key == "train.learning_rate") {
        train.learning_rate = parse_real(key, value);
    } else if (key == "train.beta1") {
        train.beta1 = parse_real(key, value);
    } else if (key == "train.beta2") {
        train.beta2 = parse_real(key, value);
    } else if (key == "train.adam_epsilon") {
        train.adam_epsilon = parse_real(key, value);
    } else if (key == "train.chunk_length") {
        train.chunk_length = parse_u64(key, value);
    } else if (key == "train.batch_size") {
        train.batch_size = parse_u64(key, value);
    } else if (key == "train.max_epochs") {
        train.max_epochs = parse_u64(key, value);
    } else if (key == "train.patience") {
        train.patience = parse_u64(key, value);
    } else if (key == "train.grad_clip") {
        train.grad_clip = parse_real(key, value);
    } else if (key == "train.seed") {
        train.seed = parse_u64(key, value);
    } else if (key == "split.train") {
        split_sizes.n_train = parse_u64(key, value);
    } else if (key == "split.validation") {
        split_sizes.n_validation = parse_u64(key, value);
    } else if (key == "split.test") {
        split_sizes.n_test = parse_u64(key, value);
    } else if (key == "split.seed") {
        split_seed = parse_u64(key, value);
    } else if (key == "split.candidates") {
        split_candidates = parse_u64(key, value);
    } else if (key == "eval_window") {
        eval_window = parse_u64(key, value);
    } else if (key == "synth.persons") {
        synth_persons = parse_u64(key, value);
    } else if (key == "synth.points") {
        synth_points = parse_u64(key, value);
    } else if (key == "synth.interval_s") {
        synth_interval_s = parse_real(key, value);
    } else if (key == "synth.dwell") {
        synth_dwell = parse_real(key, value);
    } else if (key == "synth.seed") {
        synth_seed = parse_u64(key, value);
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

PipelineConfig load_config_file(std::istream& in, std::vector<std::string>* verbatim) {
    PipelineConfig config;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (verbatim) verbatim->push_back(line);
        std::string_view body = strip_cr(line);
        size_t start = body.find_first_not_of(" \t");
        if (start == std::string_view::npos) continue;
        body = body.substr(start);
        if (body.front() == '#') continue;
        size_t eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        auto trim = [](std::string_view s) {
            size_t b = s.find_first_not_of(" \t");
            size_t e = s.find_last_not_of(" \t");
            return b == std::string_view::npos ? std::string()
                                               : std::string(s.substr(b, e - b + 1));
        };
        config.apply(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
    return config;
}

void write_config(std::ostream& out, const PipelineConfig& config) {
    for (const auto& [k, v] : config.to_kv()) out << k << " = " << v << "\n";
}

} // namespace trackmode
