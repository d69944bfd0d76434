#include "tspa/lab.hpp"

namespace tspa {

namespace {

Kic build_kic(const LabConfig& cfg, Rng& rng) {
    IdPolicy policy;
    policy.mode = cfg.id_mode;
    return kic_setup(cfg.bits, std::nullopt, cfg.f_config, policy, rng);
}

} // namespace

Lab::Lab(const LabConfig& cfg)
    : cfg_(cfg),
      rng_(cfg.seed),
      clock_(std::make_shared<ManualClock>(cfg.start_time)),
      kic_(build_kic(cfg, rng_)),
      card_(kic_.register_user(cfg.victim, cfg.password, clock_->now())),
      channel_(clock_),
      tap_(channel_, cfg.f_config),
      replay_shen_(cfg.delta_t),
      replay_improved_(cfg.delta_t) {}

InterceptedMaterial Lab::capture_login(Scheme scheme) {
    BigInt r_i = rng_.range(2, card_.n - 2);
    Timestamp t = clock_->now();
    LogicalMessage m;
    m.scheme = scheme;
    m.type = MsgType::login;
    if (scheme == Scheme::shen)
        m.body = shen_login(card_, cfg_.password, r_i, t);
    else
        m.body = improved_login(card_, cfg_.password, r_i, t);
    Bytes frame = encode_message(m, card_.modulus_width);
    channel_.send(ChannelSim::Direction::to_server, frame);
    channel_.recv(ChannelSim::Direction::to_server); // server consumes it
    auto logins = tap_.intercepted_logins();
    return logins.back();
}

AttackTarget Lab::target(Scheme scheme) {
    AttackTarget t;
    t.scheme = scheme;
    t.params = &kic_.params();
    t.policy.clock = {cfg_.delta_t, 5, clock_};
    t.policy.id = kic_.id_policy();
    // replay cache on for the improved verifier, off for the baseline
    t.policy.replay = scheme == Scheme::improved ? &replay_improved_ : nullptr;
    return t;
}

AttackReport Lab::run_attack(AttackKind kind, Scheme scheme, bool white_box_unity) {
    // Fresh victim per run so inverse_id's registered inverse identity never
    // collides with an earlier run's.
    card_ = kic_.register_user(cfg_.victim + "+" + std::to_string(run_counter_++),
                              cfg_.password, clock_->now());
    InterceptedMaterial mat = capture_login(scheme);
    AttackTarget tgt = target(scheme);
    SearchBudget budget;
    budget.window_past = cfg_.delta_t;
    switch (kind) {
        case AttackKind::euclid:
            return attack_euclid(mat, tgt, *clock_, budget);
        case AttackKind::scale:
            return attack_scale(mat, tgt, *clock_, budget);
        case AttackKind::inverse_id:
            return attack_inverse_id(mat, tgt, kic_, *clock_, rng_);
        case AttackKind::unity: {
            std::optional<BigInt> phi;
            if (white_box_unity) phi = kic_.params().phi();
            return attack_unity(mat, tgt, *clock_, budget, rng_, phi);
        }
    }
    throw std::logic_error("unknown attack kind");
}

std::vector<AttackReport> Lab::run_matrix() {
    std::vector<AttackReport> out;
    for (AttackKind kind : {AttackKind::euclid, AttackKind::scale,
                            AttackKind::inverse_id, AttackKind::unity}) {
        for (Scheme scheme : {Scheme::shen, Scheme::improved}) {
            clock_->advance(120); // fresh window per cell
            out.push_back(run_attack(kind, scheme, /*white_box_unity=*/true));
        }
    }
    return out;
}

bool matrix_matches_expectation(const std::vector<AttackReport>& reports) {
    if (reports.size() != 8) return false;
    for (const auto& r : reports) {
        if (r.scheme == Scheme::shen) {
            if (r.outcome != AttackOutcome::accepted) return false;
        } else {
            bool euclid_or_scale =
                r.attack == AttackKind::euclid || r.attack == AttackKind::scale;
            AttackOutcome want = euclid_or_scale ? AttackOutcome::inapplicable
                                                 : AttackOutcome::rejected;
            if (r.outcome != want) return false;
        }
    }
    return true;
}

} // namespace tspa
