#include "trackmode/eval.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace trackmode {

uint64_t ConfusionMatrix::total() const {
    uint64_t sum = 0;
    for (uint64_t c : counts) sum += c;
    return sum;
}

uint64_t ConfusionMatrix::trace() const {
    uint64_t sum = 0;
    for (size_t i = 0; i < n_classes; ++i) sum += at(i, i);
    return sum;
}

ConfusionMatrix confusion_from(const std::vector<size_t>& targets,
                               const std::vector<size_t>& predictions, size_t n_classes) {
    if (targets.size() != predictions.size())
        throw std::invalid_argument("confusion: length mismatch");
    ConfusionMatrix cm(n_classes);
    for (size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] >= n_classes || predictions[i] >= n_classes)
            throw std::invalid_argument("confusion: class index out of range");
        cm.add(targets[i], predictions[i]);
    }
    return cm;
}

double point_accuracy(const std::vector<size_t>& targets, const std::vector<size_t>& predictions) {
    if (targets.empty()) throw std::invalid_argument("point_accuracy: empty input");
    if (targets.size() != predictions.size())
        throw std::invalid_argument("point_accuracy: length mismatch");
    size_t correct = 0;
    for (size_t i = 0; i < targets.size(); ++i) correct += targets[i] == predictions[i] ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(targets.size());
}

double distance_accuracy(const std::vector<GpsPoint>& points,
                         const std::vector<IndexRange>& segments,
                         const std::vector<size_t>& targets,
                         const std::vector<size_t>& predictions) {
    if (points.size() != targets.size() || targets.size() != predictions.size())
        throw std::invalid_argument("distance_accuracy: length mismatch");
    double total = 0.0;
    double correct = 0.0;
    for (const IndexRange& seg : segments) {
        if (seg.end > points.size()) throw std::invalid_argument("distance_accuracy: bad segment");
        for (size_t i = seg.begin; i + 1 < seg.end; ++i) {
            const double w = haversine_distance(points[i], points[i + 1]);
            total += w;
            if (targets[i] == predictions[i]) correct += w;
        }
    }
    if (total <= 0.0) throw std::invalid_argument("distance_accuracy: zero total weight");
    return correct / total;
}

double cross_entropy(const std::vector<size_t>& targets, const Tensor& logp) {
    if (targets.empty() || targets.size() != logp.rows)
        throw std::invalid_argument("cross_entropy: length mismatch");
    double sum = 0.0;
    for (size_t t = 0; t < logp.rows; ++t) {
        double mass = 0.0;
        for (size_t c = 0; c < logp.cols; ++c) mass += std::exp(logp.at(t, c));
        if (std::abs(mass - 1.0) > 1e-6)
            throw std::invalid_argument("cross_entropy: log-probabilities not normalized");
        if (targets[t] >= logp.cols) throw std::invalid_argument("cross_entropy: label out of range");
        sum -= logp.at(t, targets[t]);
    }
    return sum / static_cast<double>(logp.rows);
}

F1Report f1_report(const ConfusionMatrix& confusion) {
    if (confusion.total() == 0) throw std::invalid_argument("f1_report: all-zero matrix");
    const size_t C = confusion.n_classes;
    F1Report report;
    report.per_class.resize(C);
    double f1_sum = 0.0;
    for (size_t c = 0; c < C; ++c) {
        uint64_t col = 0, row = 0;
        for (size_t i = 0; i < C; ++i) {
            col += confusion.at(i, c);
            row += confusion.at(c, i);
        }
        const double diag = static_cast<double>(confusion.at(c, c));
        ClassScore& s = report.per_class[c];
        s.precision = col > 0 ? diag / static_cast<double>(col) : 0.0;
        s.recall = row > 0 ? diag / static_cast<double>(row) : 0.0;
        s.f1 = (s.precision + s.recall) > 0.0
                   ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                   : 0.0;
        f1_sum += s.f1;
    }
    report.average_f1 = f1_sum / static_cast<double>(C);
    return report;
}

void write_metrics_report(std::ostream& out, const Metrics& metrics, const ClassSet& classes,
                          const std::vector<std::string>& header_lines) {
    for (const auto& h : header_lines) out << "# " << h << "\n";
    const size_t C = classes.size();
    out << std::left << std::setw(10) << "target";
    for (size_t c = 0; c < C; ++c) out << std::right << std::setw(10) << mode_name(classes.mode_at(c));
    out << std::right << std::setw(10) << "recall" << "\n";
    for (size_t r = 0; r < C; ++r) {
        out << std::left << std::setw(10) << mode_name(classes.mode_at(r));
        for (size_t c = 0; c < C; ++c) out << std::right << std::setw(10) << metrics.confusion.at(r, c);
        out << std::right << std::setw(10) << std::fixed << std::setprecision(3)
            << metrics.f1.per_class[r].recall << std::defaultfloat << "\n";
    }
    out << std::left << std::setw(10) << "precision";
    out << std::fixed << std::setprecision(3);
    for (size_t c = 0; c < C; ++c)
        out << std::right << std::setw(10) << metrics.f1.per_class[c].precision;
    out << "\n";
    out << std::left << std::setw(10) << "f1";
    for (size_t c = 0; c < C; ++c) out << std::right << std::setw(10) << metrics.f1.per_class[c].f1;
    out << std::defaultfloat << "\n\n";
    out << std::setprecision(6);
    out << "A_point    " << metrics.a_point << "\n";
    if (metrics.a_distance >= 0.0)
        out << "A_distance " << metrics.a_distance << "\n";
    else
        out << "A_distance n/a (no coordinates provided)\n";
    out << "E_H        " << metrics.e_h << "\n";
    out << "A_F1       " << metrics.f1.average_f1 << "\n";
}

} // namespace trackmode
