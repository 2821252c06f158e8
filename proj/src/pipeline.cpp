#include "trackmode/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "trackmode/error.hpp"
#include "trackmode/textio.hpp"

namespace trackmode {

double feature_value(const FeatureVector& fv, size_t f) {
    switch (f) {
    case 0: return fv.v_p;
    case 1: return fv.v_avg;
    case 2: return fv.v_sd;
    default: throw std::invalid_argument("feature index out of range");
    }
}

std::vector<CutPoints> fit_cutpoints(const std::vector<FeatureSequence>& features,
                                     const std::set<std::string>& train_persons,
                                     const PipelineConfig& config) {
    if (config.input == InputKind::raw) return {};
    const ClassSet classes = config.classes();
    std::vector<CutPoints> cuts;
    for (size_t f = 0; f < config.feature_count; ++f) {
        if (config.discretization == DiscretizationKind::entropy) {
            EmpiricalConditional data;
            data.n_classes = classes.size();
            for (const auto& seq : features) {
                if (!train_persons.count(seq.person_id)) continue;
                for (size_t i = 0; i < seq.size(); ++i)
                    data.samples.push_back(
                        {feature_value(seq.features[i], f), classes.index_of(seq.labels[i])});
            }
            if (data.samples.size() < 2)
                throw DataError("not enough training samples to fit entropy cuts");
            cuts.push_back(fit_rmep(data, config.bins));
        } else {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (const auto& seq : features) {
                if (!train_persons.count(seq.person_id)) continue;
                for (const auto& fv : seq.features) {
                    lo = std::min(lo, feature_value(fv, f));
                    hi = std::max(hi, feature_value(fv, f));
                }
            }
            if (!(lo < hi)) {
                // Constant feature in training data: widen to a token range
                // so one bin exists.
                hi = lo + 1.0;
            }
            cuts.push_back(fit_equal_width(lo, hi, config.bins));
        }
    }
    return cuts;
}

NetworkConfig network_config_from(const PipelineConfig& config,
                                  const std::vector<CutPoints>& cuts) {
    NetworkConfig nc;
    nc.n_features = config.feature_count;
    nc.n_classes = config.classes().size();
    nc.embedding_dim = config.embedding_dim;
    nc.hidden = config.hidden;
    nc.pieces = config.cell == CellKind::gru ? 1 : config.pieces;
    nc.layers = config.layers;
    nc.cell = config.cell;
    nc.input = config.input;
    if (config.input == InputKind::embedded) {
        if (cuts.size() != config.feature_count)
            throw std::invalid_argument("network config: cut points per feature required");
        for (const auto& c : cuts) nc.feature_bins.push_back(c.n_bins());
    }
    return nc;
}

EncodedSequence encode_sequence(const FeatureSequence& seq, const std::vector<CutPoints>& cuts,
                                const PipelineConfig& config) {
    EncodedSequence out;
    const size_t F = config.feature_count;
    if (config.input == InputKind::raw) {
        out.raw.reserve(seq.size());
        for (const auto& fv : seq.features) {
            Vec x(F);
            for (size_t f = 0; f < F; ++f) x[f] = feature_value(fv, f);
            out.raw.push_back(std::move(x));
        }
        return out;
    }
    const bool fuzzy = config.discretization == DiscretizationKind::fuzzy;
    const FuzzyConfig fc{config.fuzzy_overlap};
    out.steps.reserve(seq.size());
    for (const auto& fv : seq.features) {
        std::vector<std::vector<BinWeight>> step(F);
        for (size_t f = 0; f < F; ++f) {
            const double x = feature_value(fv, f);
            if (fuzzy) {
                Vec w = fuzzy_memberships(x, cuts[f], fc);
                for (size_t i = 0; i < w.size(); ++i)
                    if (w[i] != 0.0) step[f].push_back({static_cast<uint32_t>(i), w[i]});
            } else {
                step[f].push_back({static_cast<uint32_t>(bin_index(x, cuts[f])), 1.0});
            }
        }
        out.steps.push_back(std::move(step));
    }
    return out;
}

std::vector<TrainSequence> encode_subset(const std::vector<FeatureSequence>& features,
                                         const std::set<std::string>& subset,
                                         const std::vector<CutPoints>& cuts,
                                         const PipelineConfig& config) {
    const ClassSet classes = config.classes();
    std::vector<TrainSequence> out;
    for (const auto& seq : features) {
        if (!subset.count(seq.person_id)) continue;
        TrainSequence ts;
        ts.input = encode_sequence(seq, cuts, config);
        ts.labels.reserve(seq.size());
        for (Mode m : seq.labels) ts.labels.push_back(classes.index_of(m));
        out.push_back(std::move(ts));
    }
    return out;
}

TrainedModel train_pipeline(const std::vector<FeatureSequence>& features,
                            const PipelineConfig& config,
                            const std::function<void(const EpochLog&)>& on_epoch) {
    config.validate();
    if (features.empty()) throw DataError("no feature sequences to train on");
    const ClassSet classes = config.classes();

    std::vector<LabeledTrajectory> as_labeled; // only labels matter for counting
    std::vector<PersonModeCounts> counts;
    for (const auto& seq : features) {
        PersonModeCounts pc;
        pc.person_id = seq.person_id;
        pc.counts.assign(classes.size(), 0);
        for (Mode m : seq.labels) ++pc.counts[classes.index_of(m)];
        counts.push_back(std::move(pc));
    }
    DatasetSplit split =
        slobo_split(counts, config.split_sizes, config.split_seed, config.split_candidates);

    std::vector<CutPoints> cuts = fit_cutpoints(features, split.train, config);
    NetworkParams params = init_network(network_config_from(config, cuts), config.init_seed);

    auto train_set = encode_subset(features, split.train, cuts, config);
    auto val_set = encode_subset(features, split.validation, cuts, config);
    TrainResult result = train_network(train_set, val_set, std::move(params), config.train, on_epoch);

    TrainedModel out;
    out.model.config = config;
    out.model.cuts = std::move(cuts);
    out.model.split = std::move(split);
    out.model.params = std::move(result.best_params);
    out.log = std::move(result.log);
    out.best_epoch = result.best_epoch;
    return out;
}

std::vector<SequencePrediction> predict_sequences(const Model& model,
                                                  const std::vector<FeatureSequence>& features,
                                                  const std::set<std::string>* filter) {
    const ClassSet classes = model.config.classes();
    const size_t window = model.config.eval_window;
    std::vector<SequencePrediction> out;
    for (const auto& seq : features) {
        if (filter && !filter->count(seq.person_id)) continue;
        SequencePrediction sp;
        sp.person_id = seq.person_id;
        EncodedSequence enc = encode_sequence(seq, model.cuts, model.config);
        const size_t len = enc.length();
        for (size_t b = 0; b < len; b += window) {
            const size_t e = std::min(len, b + window);
            EncodedSequence win;
            if (!enc.steps.empty())
                win.steps.assign(enc.steps.begin() + static_cast<long>(b),
                                 enc.steps.begin() + static_cast<long>(e));
            else
                win.raw.assign(enc.raw.begin() + static_cast<long>(b),
                               enc.raw.begin() + static_cast<long>(e));
            Tensor logp = network_predict(model.params, win);
            for (size_t t = 0; t < logp.rows; ++t) {
                const double* row = logp.row(t);
                size_t arg = 0;
                for (size_t c = 1; c < logp.cols; ++c)
                    if (row[c] > row[arg]) arg = c;
                sp.predicted.push_back(arg);
                sp.nll_sum -= row[classes.index_of(seq.labels[b + t])];
            }
        }
        out.push_back(std::move(sp));
    }
    return out;
}

Metrics compute_metrics(const Model& model, const std::vector<FeatureSequence>& features,
                        const std::vector<SequencePrediction>& predictions,
                        const std::vector<LabeledTrajectory>* coords) {
    const ClassSet classes = model.config.classes();
    Metrics metrics;
    metrics.confusion = ConfusionMatrix(classes.size());
    double nll = 0.0;
    size_t total = 0;
    double dist_total = 0.0, dist_correct = 0.0;
    bool have_dist = coords != nullptr;

    for (const auto& sp : predictions) {
        const FeatureSequence* seq = nullptr;
        for (const auto& s : features)
            if (s.person_id == sp.person_id) {
                seq = &s;
                break;
            }
        if (!seq || seq->size() != sp.predicted.size())
            throw DataError("predictions do not align with feature sequences");
        for (size_t i = 0; i < sp.predicted.size(); ++i)
            metrics.confusion.add(classes.index_of(seq->labels[i]), sp.predicted[i]);
        nll += sp.nll_sum;
        total += sp.predicted.size();

        if (coords) {
            const LabeledTrajectory* traj = nullptr;
            for (const auto& c : *coords)
                if (c.trajectory.person_id == sp.person_id) {
                    traj = &c;
                    break;
                }
            if (!traj || traj->size() != sp.predicted.size())
                throw DataError("coordinate trajectories do not align with predictions");
            auto segments = segment(*traj, model.config.segmentation);
            const auto& pts = traj->trajectory.points;
            for (const IndexRange& seg : segments) {
                for (size_t i = seg.begin; i + 1 < seg.end; ++i) {
                    const double w = haversine_distance(pts[i], pts[i + 1]);
                    dist_total += w;
                    if (classes.index_of(traj->labels[i]) == sp.predicted[i]) dist_correct += w;
                }
            }
        }
    }
    if (total == 0) throw DataError("no points to evaluate");
    metrics.a_point =
        static_cast<double>(metrics.confusion.trace()) / static_cast<double>(total);
    metrics.e_h = nll / static_cast<double>(total);
    metrics.f1 = f1_report(metrics.confusion);
    metrics.a_distance = have_dist && dist_total > 0.0 ? dist_correct / dist_total : -1.0;
    return metrics;
}

void write_geojson(std::ostream& out, const Model& model,
                   const std::vector<LabeledTrajectory>& coords,
                   const std::vector<SequencePrediction>& predictions) {
    const ClassSet classes = model.config.classes();
    auto color_of = [](Mode m) {
        switch (m) {
        case Mode::bike: return "#800080"; // purple
        case Mode::car: return "#ff0000";  // red
        case Mode::walk: return "#ffff00"; // yellow
        case Mode::bus: return "#008000";  // green
        case Mode::train: return "#0000ff";
        case Mode::subway: return "#00ffff";
        case Mode::airplane: return "#ff00ff";
        }
        return "#808080";
    };

    nlohmann::json features_json = nlohmann::json::array();
    for (const auto& sp : predictions) {
        const LabeledTrajectory* traj = nullptr;
        for (const auto& c : coords)
            if (c.trajectory.person_id == sp.person_id) {
                traj = &c;
                break;
            }
        if (!traj || traj->size() != sp.predicted.size())
            throw DataError("geojson: coordinates do not align with predictions");
        for (size_t i = 0; i < sp.predicted.size(); ++i) {
            const GpsPoint& p = traj->trajectory.points[i];
            const Mode predicted = classes.mode_at(sp.predicted[i]);
            const Mode target = traj->labels[i];
            const bool correct = predicted == target;
            nlohmann::json f;
            f["type"] = "Feature";
            f["geometry"] = {{"type", "Point"}, {"coordinates", {p.lon, p.lat}}};
            f["properties"] = {{"person", sp.person_id},
                               {"t", p.t},
                               {"predicted", mode_name(predicted)},
                               {"actual", mode_name(target)},
                               {"correct", correct},
                               {"marker-color", correct ? color_of(predicted) : "#000000"}};
            features_json.push_back(std::move(f));
        }
    }
    nlohmann::json root;
    root["type"] = "FeatureCollection";
    root["features"] = std::move(features_json);
    out << root.dump(1) << "\n";
}

void write_learning_curve(std::ostream& out, const std::vector<EpochLog>& log,
                          const std::vector<std::string>& header_lines) {
    for (const auto& h : header_lines) out << "# " << h << "\n";
    out << "epoch,train_EH,val_EH,val_Apoint\n";
    for (const auto& e : log) {
        out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.val_loss)
            << ',' << format_double(e.val_point_accuracy) << "\n";
    }
}

} // namespace trackmode
