#include "formidex/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <string>

#include "formidex/errors.hpp"
#include "formidex/forming_index.hpp"

namespace formidex {

namespace {

std::string bus_str(int b) { return std::to_string(b); }

CMatrix complex_kron_identity(const RMatrix& b) {
  return kron_block(b, Mat2::Identity());
}

double frob(const CMatrix& m) { return m.norm(); }

}  // namespace

const DeviceEntry& NetworkCase::device_at(int bus) const {
  for (const auto& d : devices) {
    if (d.bus == bus) return d;
  }
  if (extra && extra->bus == bus) return *extra;
  throw ConfigError("no device at bus " + bus_str(bus));
}

std::vector<int> NetworkCase::output_buses() const {
  std::vector<int> out = retained;
  if (extra) out.push_back(extra->bus);
  return out;
}

void NetworkCase::validate() const {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ConfigError("omega0_rad_s: must be > 0");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("tau: must be >= 0");
  if (buses.empty()) throw ConfigError("buses: at least one bus is required");
  std::set<int> bus_set;
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (!bus_set.insert(buses[i]).second)
      throw ConfigError("buses[" + std::to_string(i) + "]: duplicate bus " + bus_str(buses[i]));
  }
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const auto& br = branches[i];
    const std::string path = "branches[" + std::to_string(i) + "]";
    if (!bus_set.count(br.from)) throw ConfigError(path + ".from: unknown bus " + bus_str(br.from));
    if (!bus_set.count(br.to)) throw ConfigError(path + ".to: unknown bus " + bus_str(br.to));
    if (br.from == br.to) throw ConfigError(path + ": self loop at bus " + bus_str(br.from));
    if (!(br.l_pu > 0.0) || !std::isfinite(br.l_pu)) throw ConfigError(path + ".l_pu: must be > 0");
  }
  if (retained.empty()) throw ConfigError("retained: at least one retained bus is required");
  std::set<int> kept;
  for (std::size_t i = 0; i < retained.size(); ++i) {
    const std::string path = "retained[" + std::to_string(i) + "]";
    if (!bus_set.count(retained[i])) throw ConfigError(path + ": unknown bus " + bus_str(retained[i]));
    if (!kept.insert(retained[i]).second)
      throw ConfigError(path + ": duplicate bus " + bus_str(retained[i]));
  }
  std::set<int> with_device;
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const std::string path = "devices[" + std::to_string(i) + "].bus";
    const int b = devices[i].bus;
    if (!kept.count(b)) throw ConfigError(path + ": bus " + bus_str(b) + " is not retained");
    if (!with_device.insert(b).second)
      throw ConfigError(path + ": duplicate device at bus " + bus_str(b));
  }
  for (int b : retained) {
    if (!with_device.count(b)) throw ConfigError("devices: retained bus " + bus_str(b) + " has no device");
  }
  if (extra) {
    if (!bus_set.count(extra->bus))
      throw ConfigError("extra_device.bus: unknown bus " + bus_str(extra->bus));
    if (kept.count(extra->bus))
      throw ConfigError("extra_device.bus: bus " + bus_str(extra->bus) + " is also retained");
  }

  // connectivity
  std::map<int, std::vector<int>> adj;
  for (const auto& br : branches) {
    adj[br.from].push_back(br.to);
    adj[br.to].push_back(br.from);
  }
  std::set<int> seen{buses.front()};
  std::queue<int> todo;
  todo.push(buses.front());
  while (!todo.empty()) {
    const int b = todo.front();
    todo.pop();
    for (int nb : adj[b]) {
      if (seen.insert(nb).second) todo.push(nb);
    }
  }
  if (seen.size() != bus_set.size()) {
    for (int b : buses) {
      if (!seen.count(b)) throw ConfigError("branches: network is disconnected (bus " + bus_str(b) + " unreachable)");
    }
  }
}

std::vector<Branch> merge_parallel(const std::vector<Branch>& branches) {
  std::map<std::pair<int, int>, double> weight;
  std::vector<std::pair<int, int>> order;
  for (const auto& br : branches) {
    const auto key = std::minmax(br.from, br.to);
    auto [it, fresh] = weight.emplace(key, 0.0);
    if (fresh) order.push_back(key);
    it->second += 1.0 / br.l_pu;
  }
  std::vector<Branch> out;
  out.reserve(order.size());
  for (const auto& key : order) out.push_back({key.first, key.second, 1.0 / weight.at(key)});
  return out;
}

SusceptanceBlocks build_susceptance(const NetworkCase& c) {
  c.validate();
  std::map<int, Eigen::Index> index;
  for (std::size_t i = 0; i < c.buses.size(); ++i) index[c.buses[i]] = static_cast<Eigen::Index>(i);
  const auto nb = static_cast<Eigen::Index>(c.buses.size());
  RMatrix lap = RMatrix::Zero(nb, nb);
  for (const auto& br : merge_parallel(c.branches)) {
    const double w = 1.0 / br.l_pu;
    const auto i = index.at(br.from);
    const auto k = index.at(br.to);
    lap(i, i) += w;
    lap(k, k) += w;
    lap(i, k) -= w;
    lap(k, i) -= w;
  }

  std::vector<Eigen::Index> keep;
  for (int b : c.output_buses()) keep.push_back(index.at(b));
  std::vector<Eigen::Index> interior;
  {
    std::set<Eigen::Index> ks(keep.begin(), keep.end());
    for (Eigen::Index i = 0; i < nb; ++i) {
      if (!ks.count(i)) interior.push_back(i);
    }
  }
  const auto nk = static_cast<Eigen::Index>(keep.size());
  const auto ni = static_cast<Eigen::Index>(interior.size());
  RMatrix lkk(nk, nk), lki(nk, ni), lii(ni, ni);
  for (Eigen::Index a = 0; a < nk; ++a) {
    for (Eigen::Index b = 0; b < nk; ++b) lkk(a, b) = lap(keep[a], keep[b]);
    for (Eigen::Index b = 0; b < ni; ++b) lki(a, b) = lap(keep[a], interior[b]);
  }
  for (Eigen::Index a = 0; a < ni; ++a) {
    for (Eigen::Index b = 0; b < ni; ++b) lii(a, b) = lap(interior[a], interior[b]);
  }

  SusceptanceBlocks out;
  if (ni > 0) {
    Eigen::FullPivLU<RMatrix> lu(lii);
    if (lu.rank() < ni) throw ConfigError("interior subnetwork is isolated from the kept buses");
    out.b = lkk - lki * lu.solve(lki.transpose());
  } else {
    out.b = lkk;
  }
  out.b = 0.5 * (out.b + out.b.transpose()).eval();

  const Eigen::Index n = static_cast<Eigen::Index>(c.n());
  out.b1 = out.b.topLeftCorner(n, n);
  out.has_extra = c.extra.has_value();
  if (out.has_extra) {
    out.b2 = out.b.block(0, n, n, 1);
    out.b3 = out.b.block(n, 0, 1, n);
    out.b4 = out.b(n, n);
    if (!(out.b4 > 0.0))
      throw ConfigError("extra_device.bus: extra bus " + bus_str(c.extra->bus) + " has no connection");
  }
  return out;
}

Absorbed absorb_device(const SusceptanceBlocks& blocks, const AdmittanceModel* y_extra, Complex s,
                       double tau, double omega0) {
  const Mat2 zi = eval_z_inverse(s, tau, omega0);
  const Eigen::Index n = blocks.b1.rows();
  Absorbed out;
  if (!blocks.has_extra) {
    out.b_net = complex_kron_identity(blocks.b1);
    out.y_net = kron_block(blocks.b1, zi);
    return out;
  }
  if (y_extra == nullptr) throw ConfigError("extra bus present without a device model");

  // direct Kron form
  const Mat2 bracket = blocks.b4 * zi + (*y_extra)(s);
  if (!all_finite(bracket) || condition_number(bracket) > 1e12)
    throw NumericalError("extra-bus bracket is singular", s);
  const CMatrix left = kron_block(blocks.b2, zi);
  const CMatrix right = kron_block(blocks.b3, zi);
  const CMatrix y_direct =
      kron_block(blocks.b1, zi) - left * bracket.partialPivLu().solve(right);

  // factored form through the extra device sensitivity at l_g = 1/B4
  const LineParams equiv{1.0 / blocks.b4, tau, omega0};
  out.s_v = sensitivity(*y_extra, equiv, s);
  const RMatrix coupling = blocks.b2 * blocks.b3 / blocks.b4;
  out.b_net = complex_kron_identity(blocks.b1) - kron_block(coupling, out.s_v);
  out.y_net = kron_block(RMatrix::Identity(n, n), zi) * out.b_net;

  // measured against the operands: the absorbed matrix itself may cancel to ~0
  const double scale = std::max({frob(kron_block(blocks.b1, zi)), frob(y_direct), frob(out.y_net)});
  const double diff = frob(y_direct - out.y_net);
  if (!(diff <= kDualFormRtol * scale)) {
    throw NumericalError("dual-form mismatch (relative difference " +
                             std::to_string(scale > 0.0 ? diff / scale : diff) + ")",
                         s);
  }
  return out;
}

Network::Network(NetworkCase c) : case_(std::move(c)) {
  blocks_ = build_susceptance(case_);
  devices_.reserve(case_.n());
  for (int bus : case_.retained) {
    devices_.push_back(build_admittance(case_.device_at(bus).spec, case_.omega0));
  }
  if (case_.extra) extra_ = build_admittance(case_.extra->spec, case_.omega0);
}

Network::Network(NetworkCase c, SusceptanceBlocks blocks, std::vector<AdmittanceModel> devices,
                 std::optional<AdmittanceModel> extra)
    : case_(std::move(c)),
      blocks_(std::move(blocks)),
      devices_(std::move(devices)),
      extra_(std::move(extra)) {}

Network Network::from_blocks(SusceptanceBlocks blocks, std::vector<AdmittanceModel> devices,
                             std::optional<AdmittanceModel> extra, double tau, double omega0) {
  const Eigen::Index n = blocks.b1.rows();
  if (n == 0 || blocks.b1.cols() != n) throw ConfigError("b1 must be square and non-empty");
  if (static_cast<Eigen::Index>(devices.size()) != n) throw ConfigError("one device per retained bus");
  if (blocks.has_extra != extra.has_value()) throw ConfigError("extra device and extra blocks must match");
  if (blocks.has_extra) {
    if (blocks.b2.size() != n || blocks.b3.size() != n) throw ConfigError("b2/b3 size mismatch");
    if (!(blocks.b4 > 0.0)) throw ConfigError("b4 must be > 0");
    blocks.b = RMatrix(n + 1, n + 1);
    blocks.b << blocks.b1, blocks.b2, blocks.b3, blocks.b4;
  } else {
    blocks.b = blocks.b1;
  }
  NetworkCase c;
  c.tau = tau;
  c.omega0 = omega0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int bus = static_cast<int>(i) + 1;
    c.buses.push_back(bus);
    c.retained.push_back(bus);
    c.devices.push_back({bus, devices[i].spec()});
  }
  if (extra) {
    c.buses.push_back(static_cast<int>(n) + 1);
    c.extra = DeviceEntry{static_cast<int>(n) + 1, extra->spec()};
  }
  return Network(std::move(c), std::move(blocks), std::move(devices), std::move(extra));
}

Network Network::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("scale factor must be > 0");
  NetworkCase sc = case_;
  for (auto& br : sc.branches) br.l_pu /= c;
  SusceptanceBlocks blocks = blocks_;
  blocks.b *= c;
  blocks.b1 *= c;
  blocks.b2 *= c;
  blocks.b3 *= c;
  blocks.b4 *= c;
  std::vector<AdmittanceModel> devices;
  devices.reserve(devices_.size());
  for (const auto& d : devices_) devices.push_back(d.scaled(c));
  std::optional<AdmittanceModel> extra;
  if (extra_) extra = extra_->scaled(c);
  return Network(std::move(sc), std::move(blocks), std::move(devices), std::move(extra));
}

CMatrix Network::device_block(Complex s) const {
  const auto n = static_cast<Eigen::Index>(devices_.size());
  CMatrix out = CMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    try {
      out.block<2, 2>(2 * i, 2 * i) = devices_[i](s);
    } catch (const NumericalError& e) {
      throw NumericalError("device at bus " + bus_str(case_.retained[i]) + ": " + e.what());
    }
  }
  return out;
}

Absorbed Network::absorb(Complex s) const {
  try {
    return absorb_device(blocks_, extra(), s, case_.tau, case_.omega0);
  } catch (const NumericalError& e) {
    if (!case_.extra) throw;
    throw NumericalError("extra device at bus " + bus_str(case_.extra->bus) + ": " + e.what());
  }
}

CMatrix Network::closed_loop(Complex s) const { return absorb(s).y_net + device_block(s); }

CMatrix Network::full_system(Complex s) const {
  if (!has_extra()) return closed_loop(s);
  const auto nr = static_cast<Eigen::Index>(n());
  CMatrix out = kron_block(blocks_.b, z_inverse(s));
  out.topLeftCorner(2 * nr, 2 * nr) += device_block(s);
  try {
    out.block<2, 2>(2 * nr, 2 * nr) += (*extra_)(s);
  } catch (const NumericalError& e) {
    throw NumericalError("extra device at bus " + bus_str(case_.extra->bus) + ": " + e.what());
  }
  return out;
}

}  // namespace formidex
