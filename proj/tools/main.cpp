// Command-line front end: stage-oriented pipeline from raw GPS files (or a
// synthetic generator) through features, training, evaluation and export.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trackmode/config.hpp"
#include "trackmode/error.hpp"
#include "trackmode/eval.hpp"
#include "trackmode/ingest.hpp"
#include "trackmode/model_io.hpp"
#include "trackmode/pipeline.hpp"
#include "trackmode/preprocess.hpp"
#include "trackmode/synth.hpp"

namespace fs = std::filesystem;
using namespace trackmode;

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides; // key=value pairs
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "plain-text key = value config file");
    cmd->add_option("--set", opts.overrides,
                    "override one config key (key=value); repeatable, wins over --config");
}

// Resolved config plus the provenance lines echoed into artifact headers.
std::pair<PipelineConfig, std::vector<std::string>> resolve_config(const CommonOpts& opts) {
    PipelineConfig config;
    std::vector<std::string> provenance;
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) throw ConfigError("cannot open config file '" + opts.config_path + "'");
        std::vector<std::string> verbatim;
        config = load_config_file(in, &verbatim);
        provenance.push_back("config file: " + opts.config_path);
        for (const auto& line : verbatim) provenance.push_back("cfg: " + line);
    }
    for (const auto& kv : opts.overrides) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        config.apply(kv.substr(0, eq), kv.substr(eq + 1));
        provenance.push_back("override: " + kv);
    }
    config.validate();
    return {config, provenance};
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open output file '" + path + "'");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file '" + path + "'");
    return in;
}

std::vector<FeatureSequence> load_feature_sequences(const std::string& path,
                                                    const ClassSet& classes) {
    auto in = open_in(path);
    return group_features_by_person(read_features(in, classes));
}

std::vector<LabeledTrajectory> load_coord_trajectories(const std::string& path,
                                                       const ClassSet& classes) {
    auto in = open_in(path);
    return group_by_person(read_dataset(in, classes));
}

int run_synth(const CommonOpts& opts, const std::string& out_path) {
    auto [config, provenance] = resolve_config(opts);
    SynthConfig sc;
    sc.profiles = default_profiles();
    for (auto& p : sc.profiles) p.dwell_mean = config.synth_dwell;
    sc.n_persons = config.synth_persons;
    sc.points_per_person = config.synth_points;
    sc.sample_interval_s = config.synth_interval_s;
    sc.seed = config.synth_seed;
    auto records = generate_records(sc);
    auto out = open_out(out_path);
    write_dataset(out, records, provenance);
    std::cout << "wrote " << records.size() << " points for " << sc.n_persons << " persons to "
              << out_path << "\n";
    return 0;
}

int run_ingest(const CommonOpts& opts, const std::string& raw_dir, const std::string& out_path) {
    auto [config, provenance] = resolve_config(opts);
    const ClassSet classes = config.classes();
    if (!fs::is_directory(raw_dir)) throw DataError("raw directory '" + raw_dir + "' not found");

    std::vector<DatasetRecord> records;
    size_t persons_labeled = 0, persons_skipped = 0;
    size_t dropped_points = 0, skipped_label_rows = 0, out_of_order = 0, overlap_hits = 0;
    std::vector<fs::path> person_dirs;
    for (const auto& entry : fs::directory_iterator(raw_dir))
        if (entry.is_directory()) person_dirs.push_back(entry.path());
    std::sort(person_dirs.begin(), person_dirs.end());

    for (const auto& dir : person_dirs) {
        const std::string person_id = dir.filename().string();
        const fs::path labels_path = dir / "labels.txt";
        if (!fs::exists(labels_path)) {
            ++persons_skipped;
            continue;
        }
        auto labels_in = open_in(labels_path.string());
        LabelStats lstats;
        auto intervals = parse_labels(labels_in, classes, &lstats);
        skipped_label_rows += lstats.skipped_unknown_mode;
        ++persons_labeled;

        std::vector<fs::path> plt_files;
        const fs::path traj_dir = dir / "Trajectory";
        if (fs::is_directory(traj_dir))
            for (const auto& f : fs::directory_iterator(traj_dir))
                if (f.path().extension() == ".plt") plt_files.push_back(f.path());
        std::sort(plt_files.begin(), plt_files.end());

        for (const auto& plt : plt_files) {
            auto plt_in = open_in(plt.string());
            PltStats pstats;
            Trajectory traj;
            try {
                traj = parse_plt(plt_in, person_id, &pstats);
            } catch (const DataError& e) {
                throw DataError(plt.string() + ": " + e.what());
            }
            out_of_order += pstats.dropped_out_of_order;
            AttachStats astats;
            LabeledTrajectory lt = attach_labels(traj, intervals, &astats);
            dropped_points += astats.dropped_unlabeled;
            overlap_hits += astats.overlap_hits;
            for (size_t i = 0; i < lt.size(); ++i) {
                const GpsPoint& p = lt.trajectory.points[i];
                records.push_back({person_id, p.lat, p.lon, p.t, lt.labels[i]});
            }
        }
    }
    auto out = open_out(out_path);
    write_dataset(out, records, provenance);
    std::cout << "persons with labels: " << persons_labeled << " (skipped " << persons_skipped
              << " without labels.txt)\n"
              << "labeled points: " << records.size() << "\n"
              << "dropped unlabeled points: " << dropped_points << "\n"
              << "dropped out-of-order points: " << out_of_order << "\n"
              << "label rows outside the class set: " << skipped_label_rows << "\n"
              << "points claimed by overlapping intervals: " << overlap_hits << "\n";
    return 0;
}

int run_preprocess(const CommonOpts& opts, const std::string& dataset_path,
                   const std::string& out_path) {
    auto [config, provenance] = resolve_config(opts);
    const ClassSet classes = config.classes();
    auto trajectories = load_coord_trajectories(dataset_path, classes);
    if (trajectories.empty()) throw DataError("dataset holds no points");

    std::vector<FeatureRecord> records;
    for (const auto& lt : trajectories) {
        auto features = featurize(lt, config.segmentation, config.hampel);
        for (size_t i = 0; i < features.size(); ++i)
            records.push_back({lt.trajectory.person_id, lt.trajectory.points[i].t, features[i],
                               lt.labels[i]});
    }
    auto out = open_out(out_path);
    write_features(out, records, provenance);
    std::cout << "wrote " << records.size() << " feature rows for " << trajectories.size()
              << " persons to " << out_path << "\n";
    return 0;
}

int run_train(const CommonOpts& opts, const std::string& features_path,
              const std::string& model_path, const std::string& log_path) {
    auto [config, provenance] = resolve_config(opts);
    auto sequences = load_feature_sequences(features_path, config.classes());
    TrainedModel trained = train_pipeline(sequences, config, [](const EpochLog& e) {
        std::cout << "epoch " << e.epoch << ": train_EH " << e.train_loss << "  val_EH "
                  << e.val_loss << "  val_Apoint " << e.val_point_accuracy << "\n";
    });
    {
        auto out = open_out(model_path);
        save_model(out, trained.model, provenance);
    }
    if (!log_path.empty()) {
        auto out = open_out(log_path);
        write_learning_curve(out, trained.log, provenance);
    }
    std::cout << "best epoch " << trained.best_epoch << "; model written to " << model_path
              << "\n";
    return 0;
}

const std::set<std::string>* split_subset(const Model& model, const std::string& name) {
    if (name == "train") return &model.split.train;
    if (name == "validation") return &model.split.validation;
    if (name == "test") return &model.split.test;
    if (name == "all") return nullptr;
    throw ConfigError("unknown split '" + name + "' (use train/validation/test/all)");
}

int run_evaluate(const std::string& features_path, const std::string& model_path,
                 const std::string& split_name, const std::string& dataset_path,
                 const std::string& report_path) {
    Model model = [&] {
        auto in = open_in(model_path);
        return load_model(in);
    }();
    auto sequences = load_feature_sequences(features_path, model.config.classes());
    const std::set<std::string>* subset = split_subset(model, split_name);

    auto predictions = predict_sequences(model, sequences, subset);
    if (predictions.empty()) throw DataError("split '" + split_name + "' matches no persons");

    std::vector<LabeledTrajectory> coords;
    const std::vector<LabeledTrajectory>* coords_ptr = nullptr;
    if (!dataset_path.empty()) {
        coords = load_coord_trajectories(dataset_path, model.config.classes());
        coords_ptr = &coords;
    }
    Metrics metrics = compute_metrics(model, sequences, predictions, coords_ptr);

    std::vector<std::string> header{"model: " + model_path, "split: " + split_name};
    if (report_path.empty()) {
        write_metrics_report(std::cout, metrics, model.config.classes(), header);
    } else {
        auto out = open_out(report_path);
        write_metrics_report(out, metrics, model.config.classes(), header);
        std::cout << "A_point " << metrics.a_point << "  E_H " << metrics.e_h << "  A_F1 "
                  << metrics.f1.average_f1 << "; report written to " << report_path << "\n";
    }
    return 0;
}

int run_predict(const std::string& features_path, const std::string& model_path,
                const std::string& out_path, const std::string& geojson_path,
                const std::string& dataset_path) {
    Model model = [&] {
        auto in = open_in(model_path);
        return load_model(in);
    }();
    const ClassSet classes = model.config.classes();
    auto sequences = load_feature_sequences(features_path, classes);
    auto predictions = predict_sequences(model, sequences);

    auto out = open_out(out_path);
    out << "person_id,t,predicted_mode\n";
    for (const auto& sp : predictions) {
        const FeatureSequence* seq = nullptr;
        for (const auto& s : sequences)
            if (s.person_id == sp.person_id) seq = &s;
        for (size_t i = 0; i < sp.predicted.size(); ++i)
            out << sp.person_id << ',' << seq->t[i] << ','
                << mode_name(classes.mode_at(sp.predicted[i])) << "\n";
    }
    std::cout << "wrote predictions for " << predictions.size() << " persons to " << out_path
              << "\n";

    if (!geojson_path.empty()) {
        if (dataset_path.empty())
            throw ConfigError("--geojson requires --dataset for coordinates");
        auto coords = load_coord_trajectories(dataset_path, classes);
        auto gj = open_out(geojson_path);
        write_geojson(gj, model, coords, predictions);
        std::cout << "wrote GeoJSON to " << geojson_path << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"point-based transportation mode classifier for GPS trajectories"};
    app.require_subcommand(1);

    CommonOpts synth_opts, ingest_opts, pre_opts, train_opts;
    std::string out_path, raw_dir, dataset_path, features_path, model_path;
    std::string log_path, split_name = "test", report_path, geojson_path, predictions_path;

    auto* synth_cmd = app.add_subcommand("synth", "generate a labeled synthetic dataset");
    add_common(synth_cmd, synth_opts);
    synth_cmd->add_option("--out", out_path, "output dataset file")->required();

    auto* ingest_cmd =
        app.add_subcommand("ingest", "parse raw PLT trajectories and labels into a dataset");
    add_common(ingest_cmd, ingest_opts);
    ingest_cmd->add_option("--raw-dir", raw_dir, "directory of per-person folders")->required();
    ingest_cmd->add_option("--out", out_path, "output dataset file")->required();

    auto* pre_cmd = app.add_subcommand("preprocess", "filter, segment and extract features");
    add_common(pre_cmd, pre_opts);
    pre_cmd->add_option("--dataset", dataset_path, "canonical dataset file")->required();
    pre_cmd->add_option("--out", out_path, "output feature file")->required();

    auto* train_cmd = app.add_subcommand("train", "fit discretizers and train the network");
    add_common(train_cmd, train_opts);
    train_cmd->add_option("--features", features_path, "feature file")->required();
    train_cmd->add_option("--model-out", model_path, "output model file")->required();
    train_cmd->add_option("--log-out", log_path, "learning-curve log file");

    auto* eval_cmd = app.add_subcommand("evaluate", "metrics report for a named split");
    eval_cmd->add_option("--features", features_path, "feature file")->required();
    eval_cmd->add_option("--model", model_path, "model file")->required();
    eval_cmd->add_option("--split", split_name, "train|validation|test|all (default test)");
    eval_cmd->add_option("--dataset", dataset_path,
                         "canonical dataset for distance-weighted accuracy");
    eval_cmd->add_option("--report-out", report_path, "report file (stdout when omitted)");

    auto* pred_cmd = app.add_subcommand("predict", "per-point predicted modes");
    pred_cmd->add_option("--features", features_path, "feature file")->required();
    pred_cmd->add_option("--model", model_path, "model file")->required();
    pred_cmd->add_option("--out", predictions_path, "output predictions file")->required();
    pred_cmd->add_option("--geojson", geojson_path, "optional GeoJSON export");
    pred_cmd->add_option("--dataset", dataset_path, "dataset file (required for --geojson)");

    try {
        app.parse(argc, argv);
        if (synth_cmd->parsed()) return run_synth(synth_opts, out_path);
        if (ingest_cmd->parsed()) return run_ingest(ingest_opts, raw_dir, out_path);
        if (pre_cmd->parsed()) return run_preprocess(pre_opts, dataset_path, out_path);
        if (train_cmd->parsed()) return run_train(train_opts, features_path, model_path, log_path);
        if (eval_cmd->parsed())
            return run_evaluate(features_path, model_path, split_name, dataset_path, report_path);
        if (pred_cmd->parsed())
            return run_predict(features_path, model_path, predictions_path, geojson_path,
                               dataset_path);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DivergenceError& e) {
        std::cerr << "numerical divergence: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
