#include "qmeas/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qmeas {

namespace {

std::string full_precision(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

template <typename F>
auto parse_guard(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed " + what + ": " + e.what());
    }
}

}  // namespace

OrderedJson matrix_to_json(const CMatrix& m) {
    OrderedJson j;
    j["dim"] = m.rows();
    std::vector<std::vector<double>> re(m.rows()), im(m.rows());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        re[r].resize(m.cols());
        im[r].resize(m.cols());
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            re[r][c] = m(r, c).real();
            im[r][c] = m(r, c).imag();
        }
    }
    j["re"] = re;
    j["im"] = im;
    return j;
}

CMatrix matrix_from_json(const Json& j) {
    return parse_guard("matrix", [&] {
        const auto dim = j.at("dim").get<Eigen::Index>();
        const auto re = j.at("re").get<std::vector<std::vector<double>>>();
        const auto im = j.at("im").get<std::vector<std::vector<double>>>();
        if (dim < 1) throw ValidationError("matrix dim must be >= 1");
        if (re.size() != static_cast<std::size_t>(dim) || im.size() != static_cast<std::size_t>(dim))
            throw ValidationError("matrix re/im row count != dim");
        CMatrix m(dim, dim);
        for (Eigen::Index r = 0; r < dim; ++r) {
            if (re[r].size() != static_cast<std::size_t>(dim) ||
                im[r].size() != static_cast<std::size_t>(dim))
                throw ValidationError("matrix re/im column count != dim");
            for (Eigen::Index c = 0; c < dim; ++c)
                m(r, c) = Complex(re[r][c], im[r][c]);
        }
        return m;
    });
}

OrderedJson state_family_to_json(const ParametrisedState& s) {
    OrderedJson j;
    j["param_dim"] = s.param_dim;
    std::vector<std::vector<double>> grid;
    for (const auto& p : s.grid) grid.emplace_back(p.data(), p.data() + p.size());
    j["grid"] = grid;
    j["cell_volumes"] = s.cell_volumes;
    OrderedJson states = OrderedJson::array();
    for (const auto& st : s.states) states.push_back(matrix_to_json(st.matrix()));
    j["states"] = states;
    return j;
}

ParametrisedState state_family_from_json(const Json& j, const Tolerances& tol) {
    return parse_guard("state family", [&] {
        const int n = j.at("param_dim").get<int>();
        const auto grid_raw = j.at("grid").get<std::vector<std::vector<double>>>();
        const auto vols = j.at("cell_volumes").get<std::vector<double>>();
        std::vector<RVector> grid;
        for (const auto& p : grid_raw)
            grid.push_back(Eigen::Map<const RVector>(p.data(), static_cast<Eigen::Index>(p.size())));
        std::vector<DensityMatrix> states;
        for (const auto& m : j.at("states")) states.push_back(validate_state(matrix_from_json(m), tol));
        return ParametrisedState(n, std::move(grid), std::move(states), vols);
    });
}

OrderedJson povm_to_json(const Povm& m) {
    OrderedJson j;
    OrderedJson effects = OrderedJson::array();
    for (const auto& e : m.effects()) effects.push_back(matrix_to_json(e));
    j["effects"] = effects;
    return j;
}

Povm povm_from_json(const Json& j, const Tolerances& tol) {
    return parse_guard("POVM", [&] {
        std::vector<CMatrix> effects;
        for (const auto& e : j.at("effects")) effects.push_back(matrix_from_json(e));
        return Povm(std::move(effects), tol);
    });
}

OrderedJson kraus_to_json(const KrausMeasurement& f) {
    OrderedJson j;
    OrderedJson ops = OrderedJson::array();
    for (std::size_t i = 0; i < f.outcomes(); ++i) ops.push_back(matrix_to_json(f.kraus(i)));
    j["kraus"] = ops;
    return j;
}

KrausMeasurement kraus_from_json(const Json& j, const Tolerances& tol) {
    return parse_guard("Kraus measurement", [&] {
        std::vector<CMatrix> ops;
        for (const auto& e : j.at("kraus")) ops.push_back(matrix_from_json(e));
        return KrausMeasurement(std::move(ops), tol);
    });
}

OrderedJson estimator_to_json(const Estimator& e) {
    OrderedJson j;
    std::vector<std::vector<double>> values;
    for (const auto& v : e.values) values.emplace_back(v.data(), v.data() + v.size());
    j["values"] = values;
    return j;
}

Estimator estimator_from_json(const Json& j) {
    return parse_guard("estimator", [&] {
        const auto raw = j.at("values").get<std::vector<std::vector<double>>>();
        std::vector<RVector> values;
        for (const auto& v : raw)
            values.push_back(Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size())));
        return Estimator(std::move(values));
    });
}

OrderedJson prior_to_json(const Prior& p) {
    OrderedJson j;
    j["weights"] = p.weights;
    return j;
}

Prior prior_from_json(const Json& j) {
    return parse_guard("prior", [&] { return Prior(j.at("weights").get<std::vector<double>>()); });
}

OrderedJson risk_profile_to_json(const RiskProfile& p) {
    OrderedJson j;
    std::vector<std::vector<double>> grid;
    for (const auto& g : p.grid) grid.emplace_back(g.data(), g.data() + g.size());
    j["grid"] = grid;
    j["risk"] = p.values;
    return j;
}

std::string risk_profile_to_csv(const RiskProfile& p, const std::vector<std::string>& comments) {
    std::ostringstream out;
    for (const auto& c : comments) out << "# " << c << "\n";
    const Eigen::Index n = p.grid.empty() ? 1 : p.grid.front().size();
    for (Eigen::Index i = 0; i < n; ++i) out << "theta_" << (i + 1) << ",";
    out << "risk\n";
    for (std::size_t row = 0; row < p.values.size(); ++row) {
        for (Eigen::Index i = 0; i < n; ++i) out << full_precision(p.grid[row](i)) << ",";
        out << full_precision(p.values[row]) << "\n";
    }
    return out.str();
}

OrderedJson tolerances_to_json(const Tolerances& tol) {
    OrderedJson j;
    j["herm"] = tol.herm;
    j["trace"] = tol.trace;
    j["psd"] = tol.psd;
    j["povm"] = tol.povm;
    j["comm"] = tol.comm;
    j["prob"] = tol.prob;
    j["rank"] = tol.rank;
    j["dom"] = tol.dom;
    j["eq"] = tol.eq;
    j["group"] = tol.group;
    return j;
}

Tolerances tolerances_from_json(const Json& j) {
    return parse_guard("tolerances", [&] {
        Tolerances tol;
        if (j.contains("herm")) tol.herm = j["herm"].get<double>();
        if (j.contains("trace")) tol.trace = j["trace"].get<double>();
        if (j.contains("psd")) tol.psd = j["psd"].get<double>();
        if (j.contains("povm")) tol.povm = j["povm"].get<double>();
        if (j.contains("comm")) tol.comm = j["comm"].get<double>();
        if (j.contains("prob")) tol.prob = j["prob"].get<double>();
        if (j.contains("rank")) tol.rank = j["rank"].get<double>();
        if (j.contains("dom")) tol.dom = j["dom"].get<double>();
        if (j.contains("eq")) tol.eq = j["eq"].get<double>();
        if (j.contains("group")) tol.group = j["group"].get<double>();
        return tol;
    });
}

OrderedJson bayes_solution_to_json(const BayesSolution& sol) {
    OrderedJson j;
    j["lambda"] = matrix_to_json(sol.lambda);
    j["measurement"] = povm_to_json(sol.measurement);
    j["estimator"] = estimator_to_json(sol.estimator);
    j["bayes_risk"] = sol.bayes_risk;
    j["anticommutator_residual"] = sol.anticommutator_residual;
    j["lambda_hermiticity_residual"] = hermiticity_residual(sol.lambda);
    return j;
}

OrderedJson refinement_domination_to_json(const RefinementDomination& d) {
    OrderedJson j;
    j["kind"] = "refineable";
    j["witness"] = {{"outcome", d.refined.source_outcome},
                    {"theta_a", d.theta_a},
                    {"theta_b", d.theta_b}};
    j["constructed_measurement"] = kraus_to_json(d.refined.measurement);
    OrderedJson labels = OrderedJson::array();
    for (const auto& [orig, sub] : d.refined.labels) labels.push_back({orig, sub});
    j["outcome_labels"] = labels;
    j["estimator"] = estimator_to_json(d.estimator);
    j["estimator_split"] = d.estimator_split;
    j["bayes_risk_refined"] = d.bayes_risk_refined;
    j["bayes_risk_original"] = d.bayes_risk_original;
    j["improvement"] = d.improvement;
    j["lift_max_deviation"] = d.lift_max_deviation;
    j["risk_table"] = risk_profile_to_json(d.profile);
    return j;
}

OrderedJson uninformative_domination_to_json(const UninformativeDomination& d) {
    OrderedJson j;
    j["kind"] = "uninformative";
    j["witness"] = {{"theta_a", d.theta_a}, {"theta_b", d.theta_b}};
    j["constructed_measurement"] = povm_to_json(d.measurement);
    j["estimator"] = estimator_to_json(d.estimator);
    j["best_constant"] = std::vector<double>(d.best_constant.data(),
                                             d.best_constant.data() + d.best_constant.size());
    j["risk_ours"] = {d.risk_ours_a, d.risk_ours_b};
    j["risk_constant"] = {d.risk_const_a, d.risk_const_b};
    j["verdict"] = d.verdict == Domination::Dominates       ? "dominates"
                   : d.verdict == Domination::WeaklyBetter  ? "weakly_better"
                                                            : "incomparable";
    j["margin"] = d.margin;
    j["reduction_max_violation"] = d.reduction_max_violation;
    j["risk_table"] = risk_profile_to_json(d.profile);
    return j;
}

namespace {

GridSpec grid_spec_from_json(const Json& j) {
    if (j.contains("points")) {
        auto pts = j.at("points").get<std::vector<double>>();
        std::vector<double> vols;
        if (j.contains("volumes")) vols = j.at("volumes").get<std::vector<double>>();
        return GridSpec::list(std::move(pts), std::move(vols));
    }
    return GridSpec::linspace(j.at("lo").get<double>(), j.at("hi").get<double>(),
                              j.at("count").get<int>(), j.value("include_hi", false));
}

}  // namespace

ScenarioSpec scenario_spec_from_json(const Json& j, const Tolerances& tol) {
    return parse_guard("scenario spec", [&]() -> ScenarioSpec {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "mach_zehnder")
            return j.contains("grid") ? ScenarioSpec::mach_zehnder(grid_spec_from_json(j["grid"]))
                                      : ScenarioSpec::mach_zehnder();
        if (kind == "thermal") {
            CMatrix h;
            if (j.contains("hamiltonian")) {
                h = matrix_from_json(j["hamiltonian"]);
            } else {
                h = CMatrix::Zero(2, 2);
                h(1, 1) = 1.0;
            }
            return ScenarioSpec::thermal(grid_spec_from_json(j.at("grid")), std::move(h));
        }
        if (kind == "depolarizing") {
            CVector psi;
            if (j.contains("pure_state")) {
                const auto re = j["pure_state"].at("re").get<std::vector<double>>();
                const auto im = j["pure_state"].at("im").get<std::vector<double>>();
                if (re.size() != im.size())
                    throw ValidationError("pure_state re/im length mismatch");
                psi.resize(static_cast<Eigen::Index>(re.size()));
                for (std::size_t i = 0; i < re.size(); ++i)
                    psi(static_cast<Eigen::Index>(i)) = Complex(re[i], im[i]);
            } else {
                psi = CVector::Zero(2);
                psi(0) = 1.0;
            }
            return ScenarioSpec::depolarizing(grid_spec_from_json(j.at("grid")), std::move(psi));
        }
        if (kind == "diagonal_classical")
            return ScenarioSpec::diagonal_classical(grid_spec_from_json(j.at("grid")));
        if (kind == "custom") {
            ScenarioSpec spec;
            spec.kind = ScenarioSpec::Kind::Custom;
            if (j.contains("family"))
                spec.custom = state_family_from_json(j["family"], tol);
            else if (j.contains("file"))
                spec.custom = state_family_from_json(load_json_file(j["file"].get<std::string>()), tol);
            else
                throw ValidationError("custom scenario needs 'family' or 'file'");
            return spec;
        }
        throw ValidationError("unknown scenario kind '" + kind + "'");
    });
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("cannot parse '" + path + "': " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw ValidationError("failed writing '" + path + "'");
}

}  // namespace qmeas
