#include <gtest/gtest.h>

#include <random>

#include "core/error.hpp"
#include "core/liquidity.hpp"
#include "support/events.hpp"
#include "support/oracles.hpp"

using namespace lobres;
using namespace lobres::liquidity;
using lobres::lob::BookState;
using lobres::lob::Level;

namespace {

BookState book(std::vector<Level> bids, std::vector<Level> asks) { return {std::move(bids), std::move(asks)}; }

MeasureSpec xlm_spec(double cap) { return {MeasureKind::Xlm, cap}; }

BookState random_book(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nlev(1, 6);
  std::uniform_int_distribution<lob::Ticks> gap(1, 4);
  std::uniform_int_distribution<lob::Volume> vol(1, 400);
  std::uniform_int_distribution<std::int64_t> cnt(1, 5);
  BookState b;
  lob::Ticks bid = 1000;
  lob::Ticks ask = bid + gap(rng);
  for (int i = nlev(rng); i > 0; --i, bid -= gap(rng)) b.bids.push_back({bid, vol(rng), cnt(rng)});
  for (int i = nlev(rng); i > 0; --i, ask += gap(rng)) b.asks.push_back({ask, vol(rng), cnt(rng)});
  return b;
}

std::unordered_map<std::uint64_t, oracle::RawOrder> to_orders(const BookState& b) {
  std::unordered_map<std::uint64_t, oracle::RawOrder> o;
  std::uint64_t id = 1;
  for (const auto& l : b.bids) o[id++] = {lob::Side::Bid, l.price, l.total_volume};
  for (const auto& l : b.asks) o[id++] = {lob::Side::Ask, l.price, l.total_volume};
  return o;
}

}  // namespace

TEST(Spread, DirectSubtraction) {
  EXPECT_EQ(spread(book({{99, 1, 1}}, {{101, 1, 1}})), 2);
  EXPECT_EQ(spread(book({{100, 1, 1}}, {{101, 1, 1}})), 1);
}

TEST(Spread, EmptySideThrows) {
  try {
    (void)spread(book({{99, 1, 1}}, {}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySide);
  }
  EXPECT_TRUE(std::isnan(evaluate(book({}, {{101, 1, 1}}), {})));
}

TEST(Xlm, OneLevelEachSide) {
  EXPECT_DOUBLE_EQ(xlm(book({{99, 10, 1}}, {{101, 10, 1}}), xlm_spec(25000)), 2.0);
}

TEST(Xlm, PartialSecondLevel) {
  const auto b = book({{99, 5, 1}, {98, 10, 1}}, {{101, 5, 1}, {102, 10, 1}});
  EXPECT_DOUBLE_EQ(xlm(b, xlm_spec(8)), 22.0 / 8.0);
}

TEST(Xlm, ExhaustedLevelNeverReadsNext) {
  // R = 5 takes level 1 exactly; the far level price must not matter.
  const auto near = book({{99, 5, 1}, {98, 10, 1}}, {{101, 5, 1}, {102, 10, 1}});
  const auto far = book({{99, 5, 1}, {50, 10, 1}}, {{101, 5, 1}, {150, 10, 1}});
  EXPECT_EQ(xlm(near, xlm_spec(5)), xlm(far, xlm_spec(5)));
  EXPECT_DOUBLE_EQ(xlm(near, xlm_spec(5)), 2.0);
}

TEST(Xlm, CapLimitedByShallowSide) {
  // R = min(cap, 3, 20) = 3.
  const auto b = book({{99, 3, 1}}, {{101, 10, 1}, {103, 10, 1}});
  EXPECT_DOUBLE_EQ(xlm(b, xlm_spec(100)), 2.0);
}

TEST(Xlm, MaxLevelsRestrictsDepth) {
  const auto b = book({{99, 5, 1}, {98, 10, 1}}, {{101, 5, 1}, {102, 10, 1}});
  MeasureSpec s = xlm_spec(8);
  s.max_levels = 1;
  EXPECT_DOUBLE_EQ(xlm(b, s), 2.0);
}

TEST(Xlm, CurrencyModeConvertsAtMid) {
  const auto b = book({{99, 5, 1}, {98, 10, 1}}, {{101, 5, 1}, {102, 10, 1}});
  MeasureSpec s = xlm_spec(8.0);
  s.currency_mode = true;
  s.tick_size = 0.01;  // mid is 1.00 per share, so 8 currency units = 8 shares
  EXPECT_DOUBLE_EQ(xlm(b, s), 22.0 / 8.0);
}

TEST(Xlm, InvalidCapRejected) {
  EXPECT_THROW(xlm(book({{99, 1, 1}}, {{101, 1, 1}}), xlm_spec(0)), Error);
}

TEST(Xlm, MatchesLiteralFillOnRandomBooks) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 2000; ++i) {
    const auto b = random_book(rng);
    const std::int64_t cap = std::uniform_int_distribution<std::int64_t>(1, 1500)(rng);
    EXPECT_EQ(xlm(b, xlm_spec(static_cast<double>(cap))), oracle::xlm(to_orders(b), cap));
    EXPECT_EQ(static_cast<double>(spread(b)), oracle::spread(to_orders(b)));
  }
}

TEST(Xlm, MoreVolumeAtTouchNeverIncreasesWithFixedSize) {
  // Holds whenever both sides already cover the cap, so R does not move.
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<lob::Volume> extra(1, 300);
  auto depth = [](const std::vector<Level>& side) {
    lob::Volume v = 0;
    for (const auto& l : side) v += l.total_volume;
    return v;
  };
  int checked = 0;
  for (int i = 0; i < 4000; ++i) {
    auto b = random_book(rng);
    const lob::Volume shallow = std::min(depth(b.bids), depth(b.asks));
    if (shallow < 1) continue;
    const auto spec = xlm_spec(static_cast<double>(std::uniform_int_distribution<lob::Volume>(1, shallow)(rng)));
    const double before = xlm(b, spec);
    (rng() % 2 ? b.asks : b.bids).front().total_volume += extra(rng);
    EXPECT_LE(xlm(b, spec), before + 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 1000);
}

TEST(Xlm, TouchVolumeCanRaiseXlmWhenSizeGrows) {
  // With R = min(cap, depths), extra bid volume lifts R and pulls deep ask
  // levels into the average.
  const auto spec = xlm_spec(100);
  auto b = book({{99, 1, 1}}, {{101, 10, 1}, {110, 10, 1}});
  EXPECT_DOUBLE_EQ(xlm(b, spec), 2.0);
  b.bids.front().total_volume += 19;
  EXPECT_DOUBLE_EQ(xlm(b, spec), 6.5);
}

TEST(Xlm, NeverBelowSpread) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 1000; ++i) {
    const auto b = random_book(rng);
    EXPECT_GE(xlm(b, xlm_spec(500)), static_cast<double>(spread(b)) - 1e-12);
  }
}

TEST(Covariates, ConstructedBookWithoutHistory) {
  const auto b = book({{99, 12, 1}, {98, 8, 1}}, {{101, 10, 1}, {102, 10, 1}, {103, 10, 1}});
  CovariateContext ctx{5000, 1000, 2.0};
  const Trigger buy{lob::EventKind::Execute, lob::Side::Ask, true};
  const auto cv = covariates(b, {}, buy, ctx);
  EXPECT_EQ(cv[0], 3);
  EXPECT_EQ(cv[1], 2);
  EXPECT_EQ(cv[2], 30);
  EXPECT_EQ(cv[3], 20);
  EXPECT_EQ(cv[4], 2.0);
  EXPECT_EQ(cv[5], 0);
  EXPECT_EQ(cv[6], 4000);  // since session open
  EXPECT_TRUE(std::isnan(cv[7]));
  EXPECT_EQ(cv[8], 1);
  EXPECT_EQ(cv[9], 0);
}

TEST(Covariates, OnlyFirstFiveLevelsCount) {
  BookState b;
  for (int i = 0; i < 8; ++i) {
    b.bids.push_back({100 - i, 1, 2});
    b.asks.push_back({101 + i, 1, 2});
  }
  const auto cv = covariates(b, {}, std::nullopt, {});
  EXPECT_EQ(cv[0], 10);
  EXPECT_EQ(cv[1], 10);
  EXPECT_EQ(cv[2], 5);
  EXPECT_EQ(cv[3], 5);
}

TEST(Covariates, HistoryFields) {
  const auto b = book({{99, 1, 1}}, {{101, 1, 1}});
  std::vector<Episode> h;
  for (int i = 0; i < 7; ++i) h.push_back({1000 * i, i < 2 ? 999 : 100});
  // Ends: 999, 1999, 2100, 3100, 4100, 5100, 6100.
  CovariateContext ctx{6500, 0, 3.0};
  const auto cv = covariates(b, h, std::nullopt, ctx);
  EXPECT_EQ(cv[5], 1);      // only 6100 falls in [5500, 6500]
  EXPECT_EQ(cv[6], 500);    // since the last start at 6000
  EXPECT_EQ(cv[7], 100);    // last five durations
  EXPECT_EQ(cv[8], 0);
  EXPECT_EQ(cv[9], 0);
}

TEST(Covariates, SellTriggerAndNonTouchExecution) {
  const auto b = book({{99, 1, 1}}, {{101, 1, 1}});
  const auto sell = covariates(b, {}, Trigger{lob::EventKind::Execute, lob::Side::Bid, true}, {});
  EXPECT_EQ(sell[8], 0);
  EXPECT_EQ(sell[9], 1);
  const auto deep = covariates(b, {}, Trigger{lob::EventKind::Execute, lob::Side::Bid, false}, {});
  EXPECT_EQ(deep[9], 0);
  const auto cancel = covariates(b, {}, Trigger{lob::EventKind::Cancel, lob::Side::Ask, true}, {});
  EXPECT_EQ(cancel[8], 0);
}
