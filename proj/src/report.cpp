#include "lbmo/report.hpp"

#include <algorithm>
#include <fstream>

#include "lbmo/error.hpp"

namespace lbmo {

namespace fs = std::filesystem;

Json aggregate_reports(const fs::path& out_dir) {
  if (!fs::is_directory(out_dir)) throw Error("report: no such directory " + out_dir.string());
  std::vector<fs::path> found;
  for (const auto& e : fs::recursive_directory_iterator(out_dir))
    if (e.is_regular_file() && e.path().filename() == "report.json") found.push_back(e.path());
  std::sort(found.begin(), found.end());

  Json list = Json::array();
  bool all_pass = true;
  for (const auto& p : found) {
    std::ifstream is(p);
    Json r;
    try {
      r = Json::parse(is);
    } catch (const nlohmann::json::exception& e) {
      throw Error("report: malformed " + p.string() + ": " + e.what());
    }
    const std::string verdict = r.value("verdict", "missing");
    all_pass = all_pass && (verdict == "pass" || verdict == "skip");
    Json item;
    item["dir"] = fs::relative(p.parent_path(), out_dir).generic_string();
    item["scenario"] = r.value("scenario", "");
    item["verdict"] = verdict;
    item["details"] = r.value("details", Json::object());
    list.push_back(item);
  }
  Json summary;
  summary["reports"] = list;
  summary["count"] = list.size();
  summary["all_pass"] = all_pass && !list.empty();
  std::ofstream os(out_dir / "summary.json");
  if (!os) throw Error("report: cannot write " + (out_dir / "summary.json").string());
  os << summary.dump(2) << '\n';
  return summary;
}

}  // namespace lbmo
