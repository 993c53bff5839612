#include "sublab/serialize.hpp"

#include <stdexcept>

namespace sublab {

json kind_to_json(const SpaceKind& kind) {
    json j;
    std::visit(
        [&j](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, StepTwo>) {
                j["kind"] = "steptwo";
                j["n"] = k.n;
                j["m"] = k.m;
                json bs = json::array();
                for (const auto& B : k.B) {
                    json rows = json::array();
                    for (int r = 0; r < B.rows(); ++r) {
                        json row = json::array();
                        for (int c = 0; c < B.cols(); ++c) row.push_back(B(r, c));
                        rows.push_back(row);
                    }
                    bs.push_back(rows);
                }
                j["B"] = bs;
                j["kappa"] = k.kappa;
                j["require_htype"] = k.require_htype;
            } else if constexpr (std::is_same_v<T, Grushin>) {
                j["kind"] = "grushin";
                j["n"] = k.n;
                j["m"] = k.m;
                j["eta"] = k.eta;
            } else if constexpr (std::is_same_v<T, Greiner>) {
                j["kind"] = "greiner";
                j["n"] = k.n;
                j["zeta"] = k.zeta;
            } else {
                j["kind"] = "filiform";
                j["n"] = k.n;
            }
        },
        kind);
    return j;
}

SpaceKind kind_from_json(const json& j) {
    if (!j.contains("kind")) throw std::invalid_argument("space: missing field 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "steptwo") {
        StepTwo k;
        k.n = j.at("n").get<int>();
        k.m = j.at("m").get<int>();
        if (!j.contains("B")) throw std::invalid_argument("space.B: required for steptwo");
        for (const auto& bj : j.at("B")) {
            const int rows = static_cast<int>(bj.size());
            Eigen::MatrixXd B(rows, rows);
            for (int r = 0; r < rows; ++r) {
                const auto& rowj = bj.at(r);
                if (static_cast<int>(rowj.size()) != rows)
                    throw std::invalid_argument("space.B: matrices must be square");
                for (int c = 0; c < rows; ++c) B(r, c) = rowj.at(c).get<double>();
            }
            k.B.push_back(std::move(B));
        }
        if (j.contains("kappa")) k.kappa = j.at("kappa").get<double>();
        if (j.contains("require_htype")) k.require_htype = j.at("require_htype").get<bool>();
        return k;
    }
    if (kind == "heisenberg") {
        const int n = j.contains("n") ? j.at("n").get<int>() : 1;
        const double kappa = j.contains("kappa") ? j.at("kappa").get<double>() : 16.0;
        StepTwo k;
        k.n = 2 * n;
        k.m = 1;
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            B(2 * i, 2 * i + 1) = 1.0;
            B(2 * i + 1, 2 * i) = -1.0;
        }
        k.B = {B};
        k.kappa = kappa;
        k.require_htype = true;
        return k;
    }
    if (kind == "grushin") {
        Grushin k;
        k.n = j.at("n").get<int>();
        k.m = j.at("m").get<int>();
        k.eta = j.at("eta").get<double>();
        return k;
    }
    if (kind == "greiner") {
        Greiner k;
        k.n = j.at("n").get<int>();
        k.zeta = j.at("zeta").get<int>();
        return k;
    }
    if (kind == "filiform") {
        Filiform k;
        k.n = j.at("n").get<int>();
        return k;
    }
    throw std::invalid_argument("space.kind: unknown kind '" + kind + "'");
}

json space_to_json(const Space& space) {
    json j = kind_to_json(space.kind());
    j["ambient_dim"] = space.ambient_dim();
    j["first_layer_dim"] = space.first_layer_dim();
    j["alpha"] = space.alpha();
    j["Q"] = space.hom_dim();
    json w = json::array();
    for (int i = 0; i < space.ambient_dim(); ++i) w.push_back(space.dilation_weights()[i]);
    j["dilation_weights"] = w;
    j["htype"] = space.is_htype();
    return j;
}

Space space_from_json(const json& j) { return make_space(kind_from_json(j)); }

} // namespace sublab
