#pragma once

#include "crford/linalg.hpp"

#include <json.hpp>

#include <string>

namespace crford {

// Machine-readable verification outcome.  Witnesses carry exact values
// (rational strings, integer coefficient lists), so certificates are
// deterministic, diffable artifacts.
struct Certificate {
    enum class Status { Pass, Fail, Undecided };

    std::string claim;
    nlohmann::json inputs = nlohmann::json::object();
    Status status = Status::Undecided;
    nlohmann::json witness = nlohmann::json::object();
    unsigned precision_bits = 0;
};

std::string status_str(Certificate::Status s);
nlohmann::json to_json(const Certificate& c);

// Exact serialization helpers.
nlohmann::json qpoly_json(const QPoly& p);       // integer (or rational) coefficients, low to high
nlohmann::json field_json(const NumberField& f); // {min_poly, root_box}
nlohmann::json elem_json(const NFElem& e);       // {min_poly, root_box, coeffs}
nlohmann::json mat_json(const Mat& m);           // rows of elem coeff lists over the common field

}  // namespace crford
