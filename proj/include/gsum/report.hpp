#pragma once

#include <json.hpp>

#include "gsum/engine.hpp"
#include "gsum/factorization.hpp"
#include "gsum/protocols.hpp"
#include "gsum/spectral.hpp"

namespace gsum {

// {"entries": [[lambda, mult], ...], "m": ..., "tol": ...}
nlohmann::json to_json(const Spectrum& spec);
// {"coeffs": [...]}
nlohmann::json to_json(const Polynomial& p);
// {"rounds": r, "values": [...], "sum": s, "max_rel_error": e, ...}
nlohmann::json to_json(const ProtocolResult& r);
// {"name": ..., "rounds": ..., "theorem": ...}
nlohmann::json describe(const Protocol& p);
nlohmann::json to_json(const VerifyReport& r);
nlohmann::json to_json(const FourierCoverReport& r);
nlohmann::json to_json(const SearchResult& r);
nlohmann::json to_json(const ApproxMeanReport& r);

}  // namespace gsum
