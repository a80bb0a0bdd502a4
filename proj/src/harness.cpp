#include "aara/harness.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace aara {

namespace {

class Enumerator {
 public:
  explicit Enumerator(const EnumOptions& opts) : opts_(opts), rng_(opts.seed) {}

  std::vector<Value> all(const SimpleType& t) {
    switch (t.kind()) {
      case SimpleType::Kind::Int: {
        std::vector<Value> out;
        for (BigInt i = opts_.lo; i <= opts_.hi; ++i) out.push_back(Value::integer(i));
        return out;
      }
      case SimpleType::Kind::Bool: return {Value::boolean(false), Value::boolean(true)};
      case SimpleType::Kind::Unit: return {Value::unit()};
      case SimpleType::Kind::Pair: return product(all(t.left()), all(t.right()));
      case SimpleType::Kind::List: return lists(all(t.elem()));
    }
    return {};
  }

 private:
  std::vector<Value> lists(const std::vector<Value>& elems) {
    std::vector<Value> out{Value::nil()};
    if (elems.empty()) return out;
    for (std::size_t n = 1; n <= opts_.max_size; ++n) {
      if (fits(elems.size(), n)) {
        std::vector<std::size_t> digit(n, 0);
        while (true) {
          std::vector<Value> items;
          for (std::size_t d : digit) items.push_back(elems[d]);
          out.push_back(Value::list(std::move(items)));
          std::size_t i = n;
          while (i > 0 && ++digit[i - 1] == elems.size()) digit[--i] = 0;
          if (i == 0) break;
        }
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);
        for (std::size_t s = 0; s < opts_.samples; ++s) {
          std::vector<Value> items;
          for (std::size_t j = 0; j < n; ++j) items.push_back(elems[pick(rng_)]);
          out.push_back(Value::list(std::move(items)));
        }
      }
    }
    return out;
  }

  std::vector<Value> product(const std::vector<Value>& ls, const std::vector<Value>& rs) {
    std::vector<Value> out;
    if (ls.empty() || rs.empty()) return out;
    if (ls.size() <= opts_.exhaustive_limit / rs.size()) {
      for (const auto& l : ls)
        for (const auto& r : rs) out.push_back(Value::pair(l, r));
      return out;
    }
    // Every left value appears at least once, then random pairs fill up.
    for (std::size_t i = 0; i < ls.size(); ++i) out.push_back(Value::pair(ls[i], rs[i % rs.size()]));
    std::uniform_int_distribution<std::size_t> pl(0, ls.size() - 1), pr(0, rs.size() - 1);
    while (out.size() < std::max(opts_.exhaustive_limit, ls.size()) + opts_.samples)
      out.push_back(Value::pair(ls[pl(rng_)], rs[pr(rng_)]));
    return out;
  }

  bool fits(std::size_t base, std::size_t n) const {
    std::size_t count = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (count > opts_.exhaustive_limit / base) return false;
      count *= base;
    }
    return true;
  }

  const EnumOptions& opts_;
  std::mt19937_64 rng_;
};

InputCheck check_one(const Program& p, const std::string& function, const FunctionReport& sig, const Value& input,
                     std::uint64_t fuel) {
  InputCheck c;
  c.input = input;
  c.bound = value_potential(input, sig.arg_type, sig.cfg) + sig.q;
  try {
    CostOutcome r = eval(p, function, input, fuel);
    c.measured = {r.q, r.q_out};
    c.net_bound = c.bound - value_potential(r.value, sig.result_type, sig.cfg) - sig.q_prime;
    c.slack = c.bound - r.q;
    c.violation = r.q > c.bound || r.q - r.q_out > c.net_bound;
  } catch (const FuelExhausted&) {
    c.exhausted = true;
  } catch (const RuntimeError& e) {
    c.error = e.what();
    c.violation = true;
  }
  return c;
}

}  // namespace

std::vector<Value> enumerate_inputs(const SimpleType& t, const EnumOptions& opts) {
  if (opts.lo > opts.hi) throw std::invalid_argument("empty integer range");
  if (opts.exhaustive_limit == 0) throw std::invalid_argument("exhaustive_limit must be positive");
  return Enumerator(opts).all(t);
}

BoundCheckReport check_bound(const Program& p, const std::string& function, const FunctionReport& sig,
                             const std::vector<Value>& inputs, std::uint64_t fuel, unsigned threads) {
  if (!p.find(function)) throw std::invalid_argument("unknown function '" + function + "'");
  BoundCheckReport out;
  out.function = function;
  out.inputs.resize(inputs.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(inputs.size(), 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < inputs.size();)
      out.inputs[i] = check_one(p, function, sig, inputs[i], fuel);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < out.inputs.size(); ++i) {
    const InputCheck& c = out.inputs[i];
    if (c.exhausted) {
      ++out.exhausted;
      continue;
    }
    ++out.checked;
    if (c.violation) ++out.violations;
    if (!c.error.empty()) continue;
    if (!out.min_slack || c.slack < *out.min_slack) out.min_slack = c.slack;
    if (!out.max_slack || c.slack > *out.max_slack) out.max_slack = c.slack;
    if (c.slack == 0) out.tight.push_back(i);
  }
  return out;
}

std::string BoundCheckReport::summary() const {
  std::ostringstream os;
  os << function << ": " << checked << " inputs checked, " << violations << " violations";
  if (exhausted) os << ", " << exhausted << " out of fuel";
  if (min_slack) os << ", slack " << to_string(*min_slack) << ".." << to_string(*max_slack);
  os << ", " << tight.size() << " tight";
  return os.str();
}

}  // namespace aara
