#include "mtsa/alloc_meter.hpp"

namespace mtsa {

namespace {
thread_local AllocMeter* t_active_meter = nullptr;
}

MeterScope::MeterScope(AllocMeter* meter) noexcept : prev_(t_active_meter) {
  t_active_meter = meter;
}

MeterScope::~MeterScope() { t_active_meter = prev_; }

AllocMeter* active_alloc_meter() noexcept { return t_active_meter; }

}  // namespace mtsa
