import type { CheckResult, CorrelationResponse, DecisionReport } from "../src/types.js";

function check(partial: Partial<CheckResult> & { input_id: string; cluster: number }): CheckResult {
  return {
    case: "equal_match",
    threshold_ms: 10,
    threshold_check: false,
    gradient_check: false,
    baseline_gradient: 0.1,
    updated_gradient: 0.1,
    gradient_change_pct: 0,
    flagged: false,
    ...partial,
  };
}

/**
 * Same shape as the planted-slowdown fixture the backend acceptance
 * suite uses: 3 threshold hits, 2 gradient hits, 1 clean, 5/6 RUN.
 */
export const slowdownReport: DecisionReport = {
  acceptable_limit: 38,
  vote_threshold: 0.5,
  checks: [
    check({ input_id: "a0", cluster: 0, threshold_check: true, gradient_check: "skipped", flagged: true }),
    check({ input_id: "a1", cluster: 0, gradient_check: true, gradient_change_pct: 66.0, flagged: true }),
    check({ input_id: "a2", cluster: 0, gradient_change_pct: 20.0 }),
    check({ input_id: "b0", cluster: 1, threshold_check: true, gradient_check: "skipped", flagged: true }),
    check({ input_id: "b1", cluster: 1, threshold_check: true, gradient_check: "skipped", flagged: true }),
    check({ input_id: "b2", cluster: 1, gradient_check: true, gradient_change_pct: 99.0, flagged: true }),
  ],
  flagged_fraction: 5 / 6,
  verdict: "RUN",
  uncertain: false,
};

export const smallCorrelation: CorrelationResponse = {
  attributes: ["exec_time", "statements", "memory"],
  r: [
    [1.0, 0.98, 0.1],
    [0.98, 1.0, null],
    [0.1, null, 1.0],
  ],
  p: [
    [0.0, 0.001, 0.4],
    [0.001, 0.0, 1.0],
    [0.4, 1.0, 0.0],
  ],
  n: 50,
  constant_attributes: [],
};
