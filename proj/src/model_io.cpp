#include "trackmode/model_io.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "trackmode/error.hpp"
#include "trackmode/textio.hpp"

namespace trackmode {

namespace {

constexpr const char* kMagic = "trackmode model v1";

void write_split_line(std::ostream& out, const char* name, const std::set<std::string>& ids) {
    out << "split " << name << ' ' << ids.size();
    for (const auto& id : ids) out << ' ' << id;
    out << "\n";
}

} // namespace

void save_model(std::ostream& out, const Model& model,
                const std::vector<std::string>& provenance_lines) {
    out << kMagic << "\n";
    for (const auto& line : provenance_lines) out << "# " << line << "\n";
    for (const auto& [k, v] : model.config.to_kv()) out << "config " << k << " = " << v << "\n";
    write_split_line(out, "train", model.split.train);
    write_split_line(out, "validation", model.split.validation);
    write_split_line(out, "test", model.split.test);
    for (size_t f = 0; f < model.cuts.size(); ++f) {
        const CutPoints& c = model.cuts[f];
        out << "cutpoints " << f << ' ' << format_double(c.lower) << ' ' << format_double(c.upper)
            << ' ' << c.cuts.size();
        for (double x : c.cuts) out << ' ' << format_double(x);
        out << "\n";
    }
    // collect_params needs a mutable reference; serialization does not modify.
    auto refs = collect_params(const_cast<NetworkParams&>(model.params));
    for (const auto& ref : refs) {
        out << "tensor " << ref.name << ' ' << ref.rows << ' ' << ref.cols << "\n";
        for (size_t r = 0; r < ref.rows; ++r) {
            const double* row = ref.data + r * ref.cols;
            for (size_t c = 0; c < ref.cols; ++c) {
                if (c) out << ' ';
                out << format_double(row[c]);
            }
            out << "\n";
        }
    }
    out << "end\n";
}

Model load_model(std::istream& in) {
    std::string line;
    size_t line_no = 0;
    if (!std::getline(in, line) || std::string(strip_cr(line)) != kMagic)
        throw DataError("not a trackmode model file (bad or missing version line)", 1);
    ++line_no;

    Model model;
    bool saw_end = false;
    std::map<std::string, std::vector<double>> tensors;
    std::map<std::string, std::pair<size_t, size_t>> tensor_shapes;

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body = strip_cr(line);
        if (body.empty() || body.front() == '#') continue;
        std::istringstream ls{std::string(body)};
        std::string tag;
        ls >> tag;
        if (tag == "config") {
            std::string rest;
            std::getline(ls, rest);
            size_t eq = rest.find('=');
            if (eq == std::string::npos) throw DataError("bad config line in model", line_no);
            auto trim = [](const std::string& s) {
                size_t b = s.find_first_not_of(" \t");
                size_t e = s.find_last_not_of(" \t");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            try {
                model.config.apply(trim(rest.substr(0, eq)), trim(rest.substr(eq + 1)));
            } catch (const ConfigError& e) {
                throw DataError(std::string("model config: ") + e.what(), line_no);
            }
        } else if (tag == "split") {
            std::string which;
            size_t n = 0;
            if (!(ls >> which >> n)) throw DataError("bad split line in model", line_no);
            std::set<std::string>* target = which == "train"        ? &model.split.train
                                            : which == "validation" ? &model.split.validation
                                            : which == "test"       ? &model.split.test
                                                                    : nullptr;
            if (!target) throw DataError("unknown split subset '" + which + "'", line_no);
            for (size_t i = 0; i < n; ++i) {
                std::string id;
                if (!(ls >> id)) throw DataError("truncated split line", line_no);
                target->insert(id);
            }
        } else if (tag == "cutpoints") {
            size_t f = 0, n = 0;
            std::string lo, hi;
            if (!(ls >> f >> lo >> hi >> n)) throw DataError("bad cutpoints line", line_no);
            if (f != model.cuts.size())
                throw DataError("cutpoints must appear in feature order", line_no);
            CutPoints c;
            c.lower = parse_double_or_throw(lo, "cut lower bound", line_no);
            c.upper = parse_double_or_throw(hi, "cut upper bound", line_no);
            for (size_t i = 0; i < n; ++i) {
                std::string x;
                if (!(ls >> x)) throw DataError("truncated cutpoints line", line_no);
                c.cuts.push_back(parse_double_or_throw(x, "cut value", line_no));
            }
            c.validate();
            model.cuts.push_back(std::move(c));
        } else if (tag == "tensor") {
            std::string name;
            size_t rows = 0, cols = 0;
            if (!(ls >> name >> rows >> cols)) throw DataError("bad tensor line", line_no);
            std::vector<double> values;
            values.reserve(rows * cols);
            for (size_t r = 0; r < rows; ++r) {
                if (!std::getline(in, line)) throw DataError("truncated tensor block", line_no);
                ++line_no;
                for (std::string_view field : split_fields(strip_cr(line), ' ')) {
                    if (field.empty()) continue;
                    values.push_back(parse_double_or_throw(field, "tensor value", line_no));
                }
            }
            if (values.size() != rows * cols)
                throw DataError("tensor '" + name + "' has wrong element count", line_no);
            tensors[name] = std::move(values);
            tensor_shapes[name] = {rows, cols};
        } else if (tag == "end") {
            saw_end = true;
            break;
        } else {
            throw DataError("unknown model directive '" + tag + "'", line_no);
        }
    }
    if (!saw_end) throw DataError("model file truncated (missing end marker)", line_no);

    model.config.validate();
    model.params = init_network(network_config_from(model.config, model.cuts), 0);
    auto refs = collect_params(model.params);
    if (refs.size() != tensors.size())
        throw DataError("model holds " + std::to_string(tensors.size()) + " tensors, expected " +
                        std::to_string(refs.size()));
    for (auto& ref : refs) {
        auto it = tensors.find(ref.name);
        if (it == tensors.end()) throw DataError("model is missing tensor '" + ref.name + "'");
        auto shape = tensor_shapes[ref.name];
        if (shape.first != ref.rows || shape.second != ref.cols)
            throw DataError("tensor '" + ref.name + "' has unexpected shape");
        std::copy(it->second.begin(), it->second.end(), ref.data);
    }
    return model;
}

} // namespace trackmode
