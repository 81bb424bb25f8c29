#include "simlpe/eval.hpp"

#include <algorithm>
#include <cstdio>

#include "simlpe/train.hpp"
#include "simlpe/wire.hpp"

namespace simlpe {

std::string format_report(const EvalReport& report) {
  const std::string& label = report.model_tag;
  const size_t name_col = std::max<size_t>(label.size(), 4);
  std::string head = "msec";
  head += std::string(name_col - 4, ' ');
  std::string row = label;
  row += std::string(name_col - label.size(), ' ');
  char cell[32];
  for (size_t i = 0; i < report.horizons_ms.size(); ++i) {
    std::snprintf(cell, sizeof(cell), "%10d", report.horizons_ms[i]);
    head += cell;
    std::snprintf(cell, sizeof(cell), "%10.2f", report.mpjpe_mm[i]);
    row += cell;
  }
  return head + "\n" + row + "\n";
}

void write_report_csv(const std::string& path, const EvalReport& report) {
  std::string buf = "horizon_ms,mpjpe_mm\n";
  for (size_t i = 0; i < report.horizons_ms.size(); ++i) {
    char line[96];
    std::snprintf(line, sizeof(line), "%d,%.9g\n", report.horizons_ms[i],
                  report.mpjpe_mm[i]);
    buf += line;
  }
  wire::write_file(path, buf);
}

void write_loss_trace(const std::string& path, const std::vector<LossRecord>& trace) {
  std::string buf = "step,lr,loss_total,loss_re,loss_v\n";
  for (const LossRecord& r : trace) {
    char line[192];
    std::snprintf(line, sizeof(line), "%lld,%.9g,%.9g,%.9g,%.9g\n",
                  static_cast<long long>(r.step), r.lr, r.total, r.re, r.v);
    buf += line;
  }
  wire::write_file(path, buf);
}

}  // namespace simlpe
