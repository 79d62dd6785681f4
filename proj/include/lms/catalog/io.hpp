#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "lms/catalog/catalog.hpp"
#include "lms/catalog/transaction_log.hpp"

namespace lms {
void to_json(nlohmann::json& j, const ShelfAddress& a);
void from_json(const nlohmann::json& j, ShelfAddress& a);
}  // namespace lms

namespace lms::catalog {

nlohmann::json state_to_json(const BookState& s);
BookState state_from_json(const nlohmann::json& j);

nlohmann::json record_to_json(const BookRecord& r);
BookRecord record_from_json(const nlohmann::json& j);  // validates barcode

nlohmann::json entry_to_json(const TransactionEntry& e);
TransactionEntry entry_from_json(const nlohmann::json& j);

/// One BookRecord per line. Blank lines are skipped.
Catalog load_catalog(const std::filesystem::path& path);
Catalog read_catalog(std::istream& in);
void save_catalog(const Catalog& catalog, const std::filesystem::path& path);
void write_catalog(const Catalog& catalog, std::ostream& out);

/// One TransactionEntry per line; sequence contiguity is enforced on load.
TransactionLog load_log(const std::filesystem::path& path);
void write_log(const TransactionLog& log, std::ostream& out);
void append_log(const std::filesystem::path& path, const std::vector<TransactionEntry>& batch);

/// CSV with header barcode,title,author,genre,width_mm. Fields may be
/// double-quoted with "" as an escaped quote. Imported books are AtIntake.
std::vector<BookRecord> read_import_csv(std::istream& in);

}  // namespace lms::catalog
