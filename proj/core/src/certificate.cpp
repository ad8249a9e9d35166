#include "crford/certificate.hpp"

namespace crford {

std::string status_str(Certificate::Status s) {
    switch (s) {
        case Certificate::Status::Pass:
            return "pass";
        case Certificate::Status::Fail:
            return "fail";
        default:
            return "undecided";
    }
}

nlohmann::json to_json(const Certificate& c) {
    return nlohmann::json{{"claim", c.claim},
                          {"inputs", c.inputs},
                          {"status", status_str(c.status)},
                          {"witness", c.witness},
                          {"precision_bits", c.precision_bits}};
}

namespace {
// Integer JSON entry when it fits, decimal string otherwise.
nlohmann::json int_or_str(const Rat& q) {
    if (q.get_den() == 1 && q.get_num().fits_slong_p()) return q.get_num().get_si();
    return rat_str(q);
}
}  // namespace

nlohmann::json qpoly_json(const QPoly& p) {
    auto arr = nlohmann::json::array();
    for (const auto& c : p.coeffs()) arr.push_back(int_or_str(c));
    return arr;
}

nlohmann::json field_json(const NumberField& f) {
    ComplexBox b = f.theta_box(32);
    return nlohmann::json{
        {"min_poly", qpoly_json(f.min_poly())},
        {"root_box", {rat_str(b.re.lo), rat_str(b.re.hi), rat_str(b.im.lo), rat_str(b.im.hi)}}};
}

nlohmann::json elem_json(const NFElem& e) {
    auto coeffs = nlohmann::json::array();
    for (const auto& c : e.coeffs()) coeffs.push_back(rat_str(c));
    nlohmann::json out = e.field() ? field_json(*e.field()) : nlohmann::json::object();
    out["coeffs"] = coeffs;
    return out;
}

nlohmann::json mat_json(const Mat& m) {
    nlohmann::json out = field_json(*m.field());
    auto rows = nlohmann::json::array();
    for (size_t i = 0; i < m.dim(); ++i) {
        auto row = nlohmann::json::array();
        for (size_t j = 0; j < m.dim(); ++j) {
            auto coeffs = nlohmann::json::array();
            for (const auto& c : m.at(i, j).coeffs()) coeffs.push_back(rat_str(c));
            row.push_back(coeffs);
        }
        rows.push_back(row);
    }
    out["entries"] = rows;
    return out;
}

}  // namespace crford
