// Command-line front-end: scenarios in, certificates and reports out.
//
// Exit codes: 0 success, 2 validation failure, 3 dimension mismatch,
// 4 search cap exceeded. Every artifact embeds a metadata block with the
// seed and the tolerance set, so outputs are self-describing and runs with
// identical configuration are byte-identical.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

#include "qmeas/io.hpp"
#include "qmeas/random.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOptions {
    std::string scenario;
    std::string state_path;
    std::string povm_path;
    std::string kraus_path;
    std::string estimator_path;
    std::string prior_path;
    std::string loss = "ls";
    std::string out_path;
    std::string format = "json";
    std::uint64_t seed = 0;
    qmeas::Tolerances tol;
};

void add_common_options(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--scenario", opt.scenario,
                    "Scenario shorthand (mz, thermal, depol, diag) or scenario spec file");
    cmd->add_option("--state", opt.state_path, "Parametrised state family file");
    cmd->add_option("--loss", opt.loss, "Loss function: ls or kl")->check(CLI::IsMember({"ls", "kl"}));
    cmd->add_option("--out", opt.out_path, "Output file (stdout when omitted)");
    cmd->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", opt.seed, "Seed for randomized sweeps (recorded in output)");
    cmd->add_option("--tol-herm", opt.tol.herm, "Hermiticity tolerance");
    cmd->add_option("--tol-trace", opt.tol.trace, "Trace tolerance");
    cmd->add_option("--tol-psd", opt.tol.psd, "PSD tolerance");
    cmd->add_option("--tol-povm", opt.tol.povm, "POVM completeness tolerance");
    cmd->add_option("--tol-comm", opt.tol.comm, "Commutator tolerance");
    cmd->add_option("--tol-prob", opt.tol.prob, "Probability tolerance");
    cmd->add_option("--tol-rank", opt.tol.rank, "Rank (kernel) tolerance");
    cmd->add_option("--tol-dom", opt.tol.dom, "Domination comparison tolerance");
    cmd->add_option("--tol-eq", opt.tol.eq, "State equality tolerance");
    cmd->add_option("--tol-group", opt.tol.group, "Eigenvalue grouping tolerance");
}

qmeas::ParametrisedState resolve_state(const CommonOptions& opt) {
    const bool has_scenario = !opt.scenario.empty();
    const bool has_state = !opt.state_path.empty();
    if (has_scenario == has_state)
        throw qmeas::ValidationError("provide exactly one of --scenario and --state");
    if (has_state)
        return qmeas::state_family_from_json(qmeas::load_json_file(opt.state_path), opt.tol);
    if (std::filesystem::exists(opt.scenario))
        return qmeas::build_scenario(
            qmeas::scenario_spec_from_json(qmeas::load_json_file(opt.scenario), opt.tol), opt.tol);
    return qmeas::build_scenario(qmeas::ScenarioSpec::from_shorthand(opt.scenario), opt.tol);
}

qmeas::LossFunction resolve_loss(const CommonOptions& opt) {
    if (opt.loss == "kl") return qmeas::LossFunction::kullback_leibler();
    return qmeas::LossFunction::least_squares();
}

qmeas::OrderedJson metadata(const CommonOptions& opt, const std::string& command) {
    qmeas::OrderedJson meta;
    meta["tool"] = "qmeas";
    meta["version"] = kVersion;
    meta["command"] = command;
    meta["seed"] = opt.seed;
    meta["tolerances"] = qmeas::tolerances_to_json(opt.tol);
    return meta;
}

void emit(const CommonOptions& opt, const std::string& content) {
    if (opt.out_path.empty())
        std::cout << content;
    else
        qmeas::write_text_file(opt.out_path, content);
}

void emit_json(const CommonOptions& opt, qmeas::OrderedJson doc) {
    if (opt.format == "csv")
        throw qmeas::ValidationError("csv output is only available for the risk command");
    emit(opt, doc.dump(2) + "\n");
}

// --- risk ---------------------------------------------------------------

int run_risk(const CommonOptions& opt) {
    if (opt.povm_path.empty()) throw qmeas::ValidationError("risk needs --povm");
    if (opt.estimator_path.empty()) throw qmeas::ValidationError("risk needs --estimator");
    const auto state = resolve_state(opt);
    const auto povm = qmeas::povm_from_json(qmeas::load_json_file(opt.povm_path), opt.tol);
    const auto est = qmeas::estimator_from_json(qmeas::load_json_file(opt.estimator_path));
    const auto loss = resolve_loss(opt);
    const auto profile = qmeas::risk_profile(state, povm, est, loss);

    if (opt.format == "csv") {
        std::vector<std::string> comments{
            std::string("tool=qmeas version=") + kVersion + " command=risk seed=" +
                std::to_string(opt.seed),
            "tolerances=" + qmeas::tolerances_to_json(opt.tol).dump()};
        emit(opt, qmeas::risk_profile_to_csv(profile, comments));
    } else {
        qmeas::OrderedJson doc;
        doc["meta"] = metadata(opt, "risk");
        doc["profile"] = qmeas::risk_profile_to_json(profile);
        emit_json(opt, doc);
    }
    return 0;
}

// --- certify ------------------------------------------------------------

int run_certify(const CommonOptions& opt) {
    const auto state = resolve_state(opt);
    const auto loss = resolve_loss(opt);
    const auto cert = qmeas::classicality_certificate(state, opt.tol.comm);

    qmeas::OrderedJson doc;
    doc["meta"] = metadata(opt, "certify");
    doc["max_commutator_norm"] = cert.max_commutator_norm;
    if (cert.classical) {
        doc["verdict"] = "optimal";
        doc["measurement"] =
            qmeas::povm_to_json(qmeas::Povm::projective_from_basis(cert.common_basis, opt.tol));
    } else if (loss.kind() == qmeas::LossFunction::Kind::LeastSquares) {
        doc["verdict"] = "no_go";
        doc["witness"] = {{"theta_a", cert.witness_a},
                          {"theta_b", cert.witness_b},
                          {"commutator_norm", cert.max_commutator_norm}};
    } else {
        // The no-go verdict applies to least-squares loss only.
        doc["verdict"] = "inconclusive";
        doc["witness"] = {{"theta_a", cert.witness_a},
                          {"theta_b", cert.witness_b},
                          {"commutator_norm", cert.max_commutator_norm}};
    }
    emit_json(opt, doc);
    return 0;
}

// --- bayes --------------------------------------------------------------

int run_bayes(const CommonOptions& opt, bool fine_grained) {
    if (opt.prior_path.empty()) throw qmeas::ValidationError("bayes needs --prior");
    const auto state = resolve_state(opt);
    const auto prior = qmeas::prior_from_json(qmeas::load_json_file(opt.prior_path));
    const auto sol = qmeas::solve_bayes_measurement(state, prior, opt.tol, fine_grained);

    qmeas::OrderedJson doc;
    doc["meta"] = metadata(opt, "bayes");
    doc["solution"] = qmeas::bayes_solution_to_json(sol);
    emit_json(opt, doc);
    return 0;
}

// --- bounds -------------------------------------------------------------

int run_bounds(const CommonOptions& opt, const std::string& classical_arg,
               const std::string& kind) {
    const auto state = resolve_state(opt);
    const auto loss = resolve_loss(opt);

    std::optional<qmeas::ParametrisedState> classical;
    if (!classical_arg.empty()) {
        if (std::filesystem::exists(classical_arg)) {
            const auto j = qmeas::load_json_file(classical_arg);
            classical = j.contains("kind")
                            ? qmeas::build_scenario(qmeas::scenario_spec_from_json(j, opt.tol), opt.tol)
                            : qmeas::state_family_from_json(j, opt.tol);
        } else {
            classical = qmeas::build_scenario(qmeas::ScenarioSpec::from_shorthand(classical_arg),
                                              opt.tol);
        }
    }

    qmeas::OrderedJson doc;
    doc["meta"] = metadata(opt, "bounds");
    if (kind == "additive" || kind == "all") {
        if (!classical) throw qmeas::ValidationError("additive bound needs --classical");
        const auto add = qmeas::additive_bound(state, *classical, loss, {}, opt.tol);
        doc["additive"] = {{"epsilon", add.epsilon},
                           {"diameter", add.diameter},
                           {"bound", add.bound}};
        doc["additive"]["measurement"] = qmeas::povm_to_json(add.measurement);
    }
    if (kind == "multiplicative" || kind == "all") {
        if (!classical) throw qmeas::ValidationError("multiplicative bound needs --classical");
        const double eta = qmeas::multiplicative_bound(state, *classical, opt.tol);
        if (std::isinf(eta))
            doc["multiplicative"] = {{"eta", "infinity"}};
        else
            doc["multiplicative"] = {{"eta", eta}};
    }
    if (kind == "local" || kind == "all") {
        const auto local = qmeas::local_bound(state, opt.tol.comm);
        doc["local"] = {{"gamma", local.gamma},
                        {"gamma_volume", local.gamma_volume},
                        {"delta", local.delta},
                        {"singleton", local.singleton}};
        doc["local"]["measurement"] = qmeas::povm_to_json(local.measurement);
    }
    emit_json(opt, doc);
    return 0;
}

// --- admissibility ------------------------------------------------------

int run_admissibility(const CommonOptions& opt) {
    const auto state = resolve_state(opt);
    const auto loss = resolve_loss(opt);
    if (opt.kraus_path.empty() == opt.povm_path.empty())
        throw qmeas::ValidationError(
            "admissibility needs exactly one of --kraus (refineability) and --povm "
            "(uninformativeness)");

    qmeas::OrderedJson doc;
    doc["meta"] = metadata(opt, "admissibility");
    // The domination argument is exact for least squares; other Bregman losses
    // get the same construction with numerically checked evidence.
    doc["least_squares_loss"] = loss.kind() == qmeas::LossFunction::Kind::LeastSquares;

    if (!opt.kraus_path.empty()) {
        const auto kraus = qmeas::kraus_from_json(qmeas::load_json_file(opt.kraus_path), opt.tol);
        const auto witness = qmeas::find_refinability(state, kraus, opt.tol);
        if (!witness) {
            doc["kind"] = "none";
            doc["note"] = "measurement is not refineable on this family";
        } else {
            const auto evidence =
                qmeas::dominate_refineable(state, kraus, loss, opt.tol, opt.seed);
            doc.update(qmeas::refinement_domination_to_json(evidence));
        }
    } else {
        const auto povm = qmeas::povm_from_json(qmeas::load_json_file(opt.povm_path), opt.tol);
        if (!qmeas::is_uninformative(state, povm, opt.tol.eq)) {
            doc["kind"] = "none";
            doc["note"] = "measurement outcome probabilities depend on the parameter";
        } else {
            const auto evidence =
                qmeas::dominate_uninformative(state, povm, loss, opt.tol, opt.seed);
            doc.update(qmeas::uninformative_domination_to_json(evidence));
        }
    }
    emit_json(opt, doc);
    return 0;
}

// --- oracle -------------------------------------------------------------

int run_oracle(const CommonOptions& opt, int resolution, double cap, std::size_t top,
               const std::string& reference_povm, const std::string& reference_estimator) {
    const auto state = resolve_state(opt);
    const auto loss = resolve_loss(opt);
    if (state.hilbert_dim() != 2)
        throw qmeas::UnsupportedDimension("oracle command supports qubit families only");
    const auto measurements = qmeas::oracle_measurement_grid(2, resolution);

    qmeas::OracleResult result;
    std::string criterion_name;
    if (!opt.prior_path.empty()) {
        criterion_name = "bayes_risk";
        const auto prior = qmeas::prior_from_json(qmeas::load_json_file(opt.prior_path));
        result = qmeas::oracle_best_pair(state, loss, measurements, {},
                                         qmeas::OracleBayesCriterion{prior}, cap);
    } else if (!reference_povm.empty() && !reference_estimator.empty()) {
        criterion_name = "pointwise_domination";
        const auto ref = qmeas::povm_from_json(qmeas::load_json_file(reference_povm), opt.tol);
        const auto est =
            qmeas::estimator_from_json(qmeas::load_json_file(reference_estimator));
        result = qmeas::oracle_best_pair(state, loss, measurements, {},
                                         qmeas::OraclePreorderCriterion{ref, est}, cap);
    } else {
        throw qmeas::ValidationError(
            "oracle needs --prior (bayes criterion) or --reference-povm with "
            "--reference-estimator (domination criterion)");
    }

    qmeas::OrderedJson doc;
    doc["meta"] = metadata(opt, "oracle");
    doc["criterion"] = criterion_name;
    doc["resolution"] = resolution;
    doc["measurements_searched"] = measurements.size();
    doc["evaluations"] = result.evaluations;
    if (criterion_name == "pointwise_domination") doc["preorder_holds"] = result.preorder_holds;
    qmeas::OrderedJson table = qmeas::OrderedJson::array();
    const std::size_t rows = top == 0 ? result.ranking.size() : std::min(top, result.ranking.size());
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& entry = result.ranking[i];
        qmeas::OrderedJson row;
        row["rank"] = i;
        row["measurement_index"] = entry.measurement_index;
        row["measurement"] = qmeas::povm_to_json(measurements[entry.measurement_index]);
        row["estimator"] = qmeas::estimator_to_json(entry.estimator);
        row["score"] = entry.score;
        table.push_back(row);
    }
    doc["ranking"] = table;
    emit_json(opt, doc);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum measurement optimality toolkit"};
    app.require_subcommand(1);

    CommonOptions opt;

    auto* risk_cmd = app.add_subcommand("risk", "Risk profile of a measurement-estimator pair");
    add_common_options(risk_cmd, opt);
    risk_cmd->add_option("--povm", opt.povm_path, "POVM file")->required();
    risk_cmd->add_option("--estimator", opt.estimator_path, "Estimator file")->required();

    auto* certify_cmd = app.add_subcommand("certify", "Optimal-measurement certificate or no-go witness");
    add_common_options(certify_cmd, opt);

    bool fine_grained = false;
    auto* bayes_cmd = app.add_subcommand("bayes", "Bayes measurement solver (single parameter)");
    add_common_options(bayes_cmd, opt);
    bayes_cmd->add_option("--prior", opt.prior_path, "Prior weights file")->required();
    bayes_cmd->add_flag("--fine-grained", fine_grained,
                        "Rank-1 outcomes instead of the coarsest grouping");

    std::string classical_arg;
    std::string bound_kind = "all";
    auto* bounds_cmd = app.add_subcommand("bounds", "Approximate-optimality bounds");
    add_common_options(bounds_cmd, opt);
    bounds_cmd->add_option("--classical", classical_arg,
                           "Classical reference family (file or scenario shorthand)");
    bounds_cmd->add_option("--kind", bound_kind, "Bound kind")
        ->check(CLI::IsMember({"additive", "multiplicative", "local", "all"}));

    auto* adm_cmd = app.add_subcommand("admissibility", "Inadmissibility certificates");
    add_common_options(adm_cmd, opt);
    adm_cmd->add_option("--kraus", opt.kraus_path, "Kraus measurement file (refineability route)");
    adm_cmd->add_option("--povm", opt.povm_path, "POVM file (uninformativeness route)");

    int resolution = 20;
    double cap = 1e7;
    std::size_t top = 0;
    std::string reference_povm, reference_estimator;
    auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive qubit measurement search");
    add_common_options(oracle_cmd, opt);
    oracle_cmd->add_option("--prior", opt.prior_path, "Prior file (bayes criterion)");
    oracle_cmd->add_option("--reference-povm", reference_povm,
                           "Reference measurement (domination criterion)");
    oracle_cmd->add_option("--reference-estimator", reference_estimator,
                           "Reference estimator (domination criterion)");
    oracle_cmd->add_option("--resolution", resolution, "Bloch grid steps per angle");
    oracle_cmd->add_option("--cap", cap, "Candidate evaluation cap");
    oracle_cmd->add_option("--top", top, "Ranking rows to emit (0 = all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (risk_cmd->parsed()) return run_risk(opt);
        if (certify_cmd->parsed()) return run_certify(opt);
        if (bayes_cmd->parsed()) return run_bayes(opt, fine_grained);
        if (bounds_cmd->parsed()) return run_bounds(opt, classical_arg, bound_kind);
        if (adm_cmd->parsed()) return run_admissibility(opt);
        if (oracle_cmd->parsed())
            return run_oracle(opt, resolution, cap, top, reference_povm, reference_estimator);
    } catch (const qmeas::SearchCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const qmeas::DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const qmeas::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qmeas::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
