// Command-line front end. Exit status: 0 success, 1 runtime error, 2 usage.

#include <cmath>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ozlasso/error.hpp"
#include "ozlasso/pipeline.hpp"
#include "ozlasso/textio.hpp"

namespace {

struct Overrides {
    std::string config;
    std::vector<std::string> settings;  // key=value
    std::string seed, variant, expansion, lambda, folds, output_dir, method;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("-c,--config", o.config, "configuration file (key = value lines)");
    sub->add_option("--set", o.settings, "override a configuration key, as key=value")->take_all();
    sub->add_option("--seed", o.seed, "random seed for fold assignment");
    sub->add_option("--variant", o.variant, "target variant: max or max8h");
    sub->add_option("--expansion", o.expansion, "feature expansion: linear or polynomial");
    sub->add_option("--lambda", o.lambda, "penalty value, or 'cv'");
    sub->add_option("--folds", o.folds, "fold assignment: random or blocked");
    sub->add_option("--method", o.method, "lasso, ridge or ols");
    sub->add_option("-o,--output-dir", o.output_dir, "directory for written artifacts");
}

ozlasso::RunConfig resolve(const Overrides& o) {
    ozlasso::RunConfig cfg;
    if (!o.config.empty()) cfg = ozlasso::load_config(o.config);
    for (const auto& kv : o.settings) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ozlasso::ConfigError("--set expects key=value, got '" + kv + "'");
        ozlasso::apply_setting(cfg, ozlasso::trim(std::string_view(kv).substr(0, eq)),
                               std::string_view(kv).substr(eq + 1));
    }
    const std::pair<const char*, const std::string*> flags[] = {
        {"seed", &o.seed},     {"variant", &o.variant}, {"expansion", &o.expansion},   {"lambda", &o.lambda},
        {"folds", &o.folds},   {"method", &o.method},   {"output_dir", &o.output_dir},
    };
    for (const auto& [key, value] : flags)
        if (!value->empty()) ozlasso::apply_setting(cfg, key, *value);
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse linear forecasting of the next-day ozone maximum"};
    app.require_subcommand(1);

    Overrides o;
    std::string model_path, predictions_path;
    ozlasso::SynthConfig synth;
    std::string synth_out = "synthetic";
    std::string synth_snr = "20";
    std::string synth_start;

    auto* ingest = app.add_subcommand("ingest", "parse and gap-fill hourly input files");
    auto* featurize = app.add_subcommand("featurize", "build the daily feature matrix");
    auto* cv = app.add_subcommand("cv", "k-fold cross-validation over the penalty grid");
    auto* train = app.add_subcommand("train", "fit a model and write model.json");
    auto* predict = app.add_subcommand("predict", "apply a saved model");
    auto* evaluate = app.add_subcommand("evaluate", "error metrics for a predictions file");
    auto* report = app.add_subcommand("report", "compare lasso, ridge, mlr and persistence");
    for (auto* s : {ingest, featurize, cv, train, predict, evaluate, report}) add_common(s, o);
    predict->add_option("-m,--model", model_path, "model.json written by train")->required();
    evaluate->add_option("-p,--predictions", predictions_path, "predictions.csv written by predict")->required();

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset with known support");
    synth_cmd->add_option("--days", synth.n_days, "number of days")->check(CLI::Range(2, 100000));
    synth_cmd->add_option("--seed", synth.seed, "generator seed");
    synth_cmd->add_option("--sparsity", synth.sparsity, "planted features (1..8)")->check(CLI::Range(1, 8));
    synth_cmd->add_option("--snr", synth_snr, "signal to noise variance ratio, or 'inf'");
    synth_cmd->add_option("--start", synth_start, "first date, YYYY-MM-DD");
    synth_cmd->add_option("-o,--out", synth_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        auto& log = std::cerr;
        if (synth_cmd->parsed()) {
            if (synth_snr == "inf") {
                synth.snr = std::numeric_limits<double>::infinity();
            } else {
                const auto v = ozlasso::parse_double(synth_snr);
                if (!v || *v <= 0.0) throw ozlasso::ConfigError("--snr must be positive or 'inf'");
                synth.snr = *v;
            }
            if (!synth_start.empty()) {
                const auto d = ozlasso::Date::parse(synth_start);
                if (!d) throw ozlasso::ConfigError("--start expects YYYY-MM-DD");
                synth.start = *d;
            }
            ozlasso::cmd_synth(synth, synth_out, log);
            return 0;
        }
        const auto cfg = resolve(o);
        if (ingest->parsed()) ozlasso::cmd_ingest(cfg, log);
        else if (featurize->parsed()) ozlasso::cmd_featurize(cfg, log);
        else if (cv->parsed()) ozlasso::cmd_cv(cfg, log);
        else if (train->parsed()) ozlasso::cmd_train(cfg, log);
        else if (predict->parsed()) ozlasso::cmd_predict(cfg, model_path, log);
        else if (evaluate->parsed()) ozlasso::cmd_evaluate(cfg, predictions_path, log);
        else if (report->parsed()) ozlasso::cmd_report(cfg, log);
        return 0;
    } catch (const ozlasso::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
