#include "weaver/device.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace weaver;

namespace {

FpqaState applyAll(const std::vector<FpqaInstruction>& instrs,
                   const DeviceSpec& spec) {
  FpqaState state;
  for (const auto& instr : instrs) {
    state = apply(state, instr, spec);
  }
  return state;
}

TrapRef slmRef(int index) { return {TrapRef::Kind::Slm, index, -1, -1}; }

} // namespace

TEST(Device, SlmInitRejectsCloseTrapsAndReinit) {
  DeviceSpec spec;
  FpqaState state;
  EXPECT_THROW(apply(state, SlmInit{{{0, 0}, {3, 0}}}, spec), DeviceError);
  state = apply(state, SlmInit{{{0, 0}, {6, 0}}}, spec);
  EXPECT_THROW(apply(state, SlmInit{{{100, 0}}}, spec), DeviceError);
  EXPECT_EQ(state.slmTraps().size(), 2U);
}

TEST(Device, SlmCapacity) {
  DeviceSpec spec;
  spec.max_slm_traps = 2;
  FpqaState state;
  EXPECT_THROW(apply(state, SlmInit{{{0, 0}, {6, 0}, {12, 0}}}, spec),
               DeviceError);
}

TEST(Device, AodInitSpacingAndCapacity) {
  DeviceSpec spec;
  FpqaState state;
  EXPECT_THROW(apply(state, AodInit{{0, 3}, {0}}, spec), DeviceError);
  EXPECT_THROW(apply(state, AodInit{{0, 6}, {0, 2}}, spec), DeviceError);
  spec.max_aod_columns = 1;
  EXPECT_THROW(apply(state, AodInit{{0, 6}, {0}}, spec), DeviceError);
  spec.max_aod_columns = 512;
  state = apply(state, AodInit{{0, 6}, {0}}, spec);
  EXPECT_THROW(apply(state, AodInit{{100}, {0}}, spec), DeviceError);
}

TEST(Device, BindErrors) {
  DeviceSpec spec;
  auto state = applyAll({SlmInit{{{0, 0}, {6, 0}}}, AodInit{{20}, {0}}}, spec);
  state = apply(state, Bind{0, slmRef(0)}, spec);
  EXPECT_THROW(apply(state, Bind{1, slmRef(0)}, spec), DeviceError); // occupied
  EXPECT_THROW(apply(state, Bind{0, slmRef(1)}, spec), DeviceError); // rebind
  EXPECT_THROW(apply(state, Bind{2, slmRef(9)}, spec), DeviceError); // unknown
  EXPECT_THROW(apply(state, Bind{2, TrapRef{TrapRef::Kind::Aod, -1, 3, 0}}, spec),
               DeviceError); // unknown aod site
  state = apply(state, Bind{3, TrapRef{TrapRef::Kind::Aod, -1, 0, 0}}, spec);
  EXPECT_THROW(apply(state, Bind{4, TrapRef{TrapRef::Kind::Aod, -1, 0, 0}}, spec),
               DeviceError); // occupied aod site
}

TEST(Device, BindEnforcesAtomSpacing) {
  DeviceSpec spec;
  // Two traps 6 um apart but an AOD intersection 2 um from trap 0.
  auto state = applyAll({SlmInit{{{0, 0}, {6, 0}}}, AodInit{{2}, {0}},
                         Bind{0, slmRef(0)}},
                        spec);
  EXPECT_THROW(apply(state, Bind{1, TrapRef{TrapRef::Kind::Aod, -1, 0, 0}}, spec),
               DeviceError);
}

TEST(Device, TransferSwapsOccupants) {
  DeviceSpec spec;
  auto state = applyAll({SlmInit{{{0, 0}, {8, 0}}}, AodInit{{0}, {10}},
                         Bind{0, slmRef(0)}},
                        spec);
  // up: slm -> aod
  state = apply(state, Transfer{0, 0, 0}, spec);
  EXPECT_EQ(state.bindings().at(0).kind, TrapRef::Kind::Aod);
  EXPECT_EQ(state.slmTraps()[0].occupant, -1);
  // down again: aod -> slm
  state = apply(state, Transfer{0, 0, 0}, spec);
  EXPECT_EQ(state.bindings().at(0).kind, TrapRef::Kind::Slm);
  EXPECT_EQ(state.slmTraps()[0].occupant, 0);
}

TEST(Device, TransferErrors) {
  DeviceSpec spec;
  auto state = applyAll({SlmInit{{{0, 0}, {8, 0}, {100, 0}}}, AodInit{{0}, {10}},
                         Bind{0, slmRef(0)}},
                        spec);
  // both empty
  EXPECT_THROW(apply(state, Transfer{1, 0, 0}, spec), DeviceError);
  // distance: slm 2 at x=100 is ~100 um from the aod intersection
  EXPECT_THROW(apply(state, Transfer{2, 0, 0}, spec), DeviceError);
  // both occupied
  auto up = apply(state, Transfer{0, 0, 0}, spec);
  up = apply(up, Bind{1, slmRef(0)}, spec);
  EXPECT_THROW(apply(up, Transfer{0, 0, 0}, spec), DeviceError);
  // unknown indices
  EXPECT_THROW(apply(state, Transfer{9, 0, 0}, spec), DeviceError);
  EXPECT_THROW(apply(state, Transfer{0, 2, 0}, spec), DeviceError);
}

TEST(Device, ShuttleMovesAndValidates) {
  DeviceSpec spec;
  auto state = applyAll({SlmInit{{{0, 0}}}, AodInit{{0, 10, 20}, {5}}}, spec);
  state = apply(state, Shuttle{Axis::Column, 1, 4.0}, spec);
  EXPECT_DOUBLE_EQ(state.aodCols()[1], 14.0);
  // crossover
  EXPECT_THROW(apply(state, Shuttle{Axis::Column, 0, 25.0}, spec), DeviceError);
  // spacing squeeze
  EXPECT_THROW(apply(state, Shuttle{Axis::Column, 2, -4.5}, spec), DeviceError);
  // unknown index
  EXPECT_THROW(apply(state, Shuttle{Axis::Row, 1, 1.0}, spec), DeviceError);
  state = apply(state, Shuttle{Axis::Row, 0, -3.0}, spec);
  EXPECT_DOUBLE_EQ(state.aodRows()[0], 2.0);
}

TEST(Device, ShuttleEnforcesAtomSpacingAgainstSlm) {
  DeviceSpec spec;
  auto state = applyAll({SlmInit{{{0, 0}}}, AodInit{{10}, {0}},
                         Bind{0, slmRef(0)},
                         Bind{1, TrapRef{TrapRef::Kind::Aod, -1, 0, 0}}},
                        spec);
  EXPECT_THROW(apply(state, Shuttle{Axis::Column, 0, -7.0}, spec), DeviceError);
  state = apply(state, Shuttle{Axis::Column, 0, -4.0}, spec);
  EXPECT_DOUBLE_EQ(state.aodCols()[0], 6.0);
}

TEST(Device, RamanRequiresBoundQubit) {
  DeviceSpec spec;
  auto state = applyAll({SlmInit{{{0, 0}}}, Bind{0, slmRef(0)}}, spec);
  EXPECT_NO_THROW(apply(state, RamanLocal{0, 1, 2, 3}, spec));
  EXPECT_THROW(apply(state, RamanLocal{5, 1, 2, 3}, spec), DeviceError);
  EXPECT_NO_THROW(apply(state, RamanGlobal{1, 2, 3}, spec));
  EXPECT_NO_THROW(apply(state, Rydberg{}, spec));
}

TEST(Device, RydbergComponentsExample) {
  // Atoms q1, q7, q8 form a chain within Rydberg range; q2 and q9 form
  // a pair; q3 and q4 are isolated singletons and must be omitted.
  DeviceSpec spec; // rydberg_distance 12
  auto state = applyAll(
      {SlmInit{{{0, 0}, {10, 0}, {20, 0}, {100, 0}, {108, 0}, {200, 0}, {300, 0}}},
       Bind{1, slmRef(0)}, Bind{7, slmRef(1)}, Bind{8, slmRef(2)},
       Bind{2, slmRef(3)}, Bind{9, slmRef(4)}, Bind{3, slmRef(5)},
       Bind{4, slmRef(6)}},
      spec);
  const auto components = rydbergComponents(state, spec);
  ASSERT_EQ(components.size(), 2U);
  EXPECT_EQ(components[0], (std::vector<int>{1, 7, 8}));
  EXPECT_EQ(components[1], (std::vector<int>{2, 9}));
}

TEST(Device, InstructionTimes) {
  DeviceSpec spec;
  EXPECT_DOUBLE_EQ(instructionTime(Transfer{0, 0, 0}, spec), 15.0e-6);
  EXPECT_DOUBLE_EQ(instructionTime(Rydberg{}, spec), 0.27e-6);
  EXPECT_DOUBLE_EQ(instructionTime(RamanLocal{0, 0, 0, 0}, spec), 1.0e-6);
  EXPECT_DOUBLE_EQ(instructionTime(Shuttle{Axis::Row, 0, -11.0}, spec),
                   11.0 / spec.move_speed);
  EXPECT_DOUBLE_EQ(instructionTime(Bind{0, slmRef(0)}, spec), 0.0);
}

TEST(Device, RandomizedStateMachineKeepsInvariants) {
  // Fuzz: fire random instructions; every accepted transition must
  // leave the state satisfying the full invariant audit.
  DeviceSpec spec;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> coord(0.0, 80.0);
  std::uniform_int_distribution<int> small(0, 5);
  std::uniform_real_distribution<double> offset(-12.0, 12.0);

  for (int episode = 0; episode < 30; ++episode) {
    FpqaState state;
    std::vector<Point> traps;
    for (int i = 0; i < 6; ++i) {
      traps.push_back({static_cast<double>(i) * 9.0, coord(rng) < 40 ? 0.0 : 30.0});
    }
    state = apply(state, SlmInit{traps}, spec);
    state = apply(state, AodInit{{90, 100, 110}, {15}}, spec);
    int accepted = 0;
    for (int step = 0; step < 120; ++step) {
      FpqaInstruction instr;
      switch (small(rng)) {
      case 0:
        instr = Bind{small(rng), slmRef(small(rng))};
        break;
      case 1:
        instr = Transfer{small(rng), small(rng) % 3, 0};
        break;
      case 2:
        instr = Shuttle{Axis::Column, small(rng) % 3, offset(rng)};
        break;
      case 3:
        instr = Shuttle{Axis::Row, 0, offset(rng)};
        break;
      case 4:
        instr = RamanLocal{small(rng), 0.5, 0.5, 0.5};
        break;
      default:
        instr = Rydberg{};
        break;
      }
      try {
        state = apply(state, instr, spec);
        ++accepted;
      } catch (const DeviceError&) {
        // rejected transitions must not corrupt the prior state
      }
      ASSERT_NO_THROW(state.validateInvariants(spec))
          << "episode " << episode << " step " << step;
    }
    EXPECT_GT(accepted, 0);
  }
}
