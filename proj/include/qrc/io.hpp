#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "qrc/amplify.hpp"
#include "qrc/model.hpp"
#include "qrc/qsim.hpp"

namespace qrc {

// Portfolio plus its group partition as read from disk.
struct PortfolioInput {
    Portfolio portfolio;
    GroupPartition groups;
};

// Parses the portfolio JSON schema:
//   { "obligors": [ {"exposure": e, "loading": a, "pd": q | "threshold": z}, ... ],
//     "groups": [n_1, ..., n_Ngr] }            (groups optional; default one group)
// Each obligor carries exactly one of "pd" (mapped through the inverse normal
// CDF) or "threshold". Schema violations raise std::invalid_argument.
PortfolioInput parse_portfolio_json(const std::string& text);
PortfolioInput load_portfolio_json(const std::string& path);

// Shortest decimal that round-trips the value exactly (std::to_chars), so
// identical inputs print byte-identically on every platform.
std::string format_double(double value);

// Fixed scientific notation with `precision` digits after the point, again
// via std::to_chars; used for frozen report files.
std::string format_double_sci(double value, int precision);

// One CSV line per basis label with a nonzero amplitude:
// label,cell,defaults,flag,re,im
std::string state_snapshot_csv(const StateVector& state, double tol = 1e-15);

// Phase schedule as a JSON document (length, delta, width, floor, phases[]).
std::string schedule_json(const FPAASchedule& schedule);

// Ledger as "key value" lines, one per counter, fixed order.
std::string ledger_lines(const QueryLedger& ledger, std::string_view prefix = "");

// SHA-1 of the git blob framing "blob <size>\0" + content, lowercase hex;
// matches `git hash-object` on the same bytes.
std::string git_blob_sha1(std::string_view content);

// Default RNG seed: the QRC_SEED environment variable when set to a valid
// unsigned integer, otherwise `fallback`.
std::uint64_t seed_from_env_or(std::uint64_t fallback);

// Reads a whole file into a string; std::invalid_argument when unreadable.
std::string read_file(const std::string& path);

}  // namespace qrc
