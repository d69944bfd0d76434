#ifndef TSPA_LAB_HPP
#define TSPA_LAB_HPP

#include "tspa/adversary.hpp"

#include <map>

namespace tspa {

/// Self-contained attack scenario: a KIC, one enrolled victim, a tapped
/// channel, and a verifier for each scheme. Drives the attack x scheme
/// matrix for the CLI and the integration tests.
struct LabConfig {
    unsigned bits = 64;
    OneWayConfig f_config{FMode::toy, 16};
    IdMode id_mode = IdMode::permissive;
    std::uint64_t delta_t = 60;
    std::uint64_t seed = 1;
    std::uint64_t start_time = 1'700'000'000;
    std::string victim = "alice";
    std::string password = "correct horse";
};

class Lab {
public:
    explicit Lab(const LabConfig& cfg);

    // Honest login of the given scheme through the tapped channel; the
    // capture becomes attack material.
    InterceptedMaterial capture_login(Scheme scheme);

    AttackTarget target(Scheme scheme);

    // Runs one attack cell. unity runs white-box when white_box_unity.
    AttackReport run_attack(AttackKind kind, Scheme scheme, bool white_box_unity);

    // All four attacks against both verifiers.
    std::vector<AttackReport> run_matrix();

    const Kic& kic() const { return kic_; }
    Kic& kic() { return kic_; }
    const CardData& card() const { return card_; }
    ManualClock& clock() { return *clock_; }
    Rng& rng() { return rng_; }

private:
    LabConfig cfg_;
    Rng rng_;
    std::shared_ptr<ManualClock> clock_;
    Kic kic_;
    CardData card_;
    ChannelSim channel_;
    ChannelTap tap_;
    ReplayCache replay_shen_, replay_improved_;
    std::uint64_t run_counter_ = 0;
};

// The matrix the analysis claims: every attack lands against the baseline
// scheme and none against the improved one.
bool matrix_matches_expectation(const std::vector<AttackReport>& reports);

} // namespace tspa

#endif
