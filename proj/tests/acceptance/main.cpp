#include <CLI11.hpp>

#include <chrono>
#include <iostream>

#include "acceptance.hpp"

namespace eqppo::acceptance {

bool Criterion::check(bool ok, const std::string& detail) {
  ok_ = ok_ && ok;
  details_.push_back(std::string(ok ? "    ok   " : "    FAIL ") + detail);
  return ok;
}

bool Criterion::report() {
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  check(s < limit_, str("runtime ", s, " s < ", limit_, " s"));
  std::cout << (ok_ ? "PASS" : "FAIL") << " criterion " << id_ << ": " << title_ << "\n";
  for (const auto& d : details_) std::cout << d << "\n";
  std::cout.flush();
  return ok_;
}

}  // namespace eqppo::acceptance

int main(int argc, char** argv) {
  using namespace eqppo::acceptance;
  CLI::App app{"acceptance criteria"};
  std::vector<int> ids;
  Options o;
  std::string out_dir = o.out_dir.string();
  app.add_option("criteria", ids, "criterion numbers 1-8 (default: all)")->check(CLI::Range(1, 8));
  app.add_option("--out-dir", out_dir, "where CSV artifacts go");
  app.add_flag("-v,--verbose", o.verbose, "print per-update progress");
  CLI11_PARSE(app, argc, argv);
  o.out_dir = out_dir;
  if (ids.empty()) ids = {1, 2, 3, 4, 5, 6, 7, 8};

  using Fn = bool (*)(const Options&);
  const Fn table[] = {criterion_1, criterion_2, criterion_3, criterion_4,
                      criterion_5, criterion_6, criterion_7, criterion_8};
  bool all = true;
  for (int id : ids) {
    bool ok = false;
    try {
      ok = table[id - 1](o);
    } catch (const std::exception& e) {
      std::cout << "FAIL criterion " << id << ": exception: " << e.what() << "\n";
    }
    std::cout.flush();
    all = all && ok;
  }
  return all ? 0 : 1;
}
