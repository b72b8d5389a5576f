/** Small sweep CSVs in the exact on-disk format the primary tool writes. */

export const METRICS_HEADER =
  "policy,vehicle_count,seed,episode,mean_reward,zeta_v2v,zeta_v2i," +
  "network_efficiency,mean_secrecy_rate,mean_loss";

export const SUMMARY_HEADER =
  "policy,vehicle_count,seed,episodes,window,mean_reward,zeta_v2v,zeta_v2i," +
  "network_efficiency,mean_secrecy_rate,mean_loss";

export function metricsCsv(rows: string[]): string {
  return ["# schema=1", METRICS_HEADER, ...rows].join("\n") + "\n";
}

export function summaryCsv(rows: string[]): string {
  return ["# schema=1", SUMMARY_HEADER, ...rows].join("\n") + "\n";
}

/** Two policies, two counts, two seeds each; values chosen unequal so
 * averaging mistakes show up. */
export function sampleSummary(): string {
  return summaryCsv([
    "seed,20,0,300,30,5.1,5.5,1.2,5.07,8.1,0.4",
    "seed,20,1,300,30,5.3,5.7,1.4,5.27,8.3,0.5",
    "seed,40,0,300,30,4.1,4.5,1.1,4.16,7.1,0.6",
    "seed,40,1,300,30,4.3,4.7,1.3,4.36,7.3,0.7",
    "random,20,0,300,30,2.1,2.5,1.0,2.35,4.1,nan",
    "random,20,1,300,30,2.3,2.7,1.2,2.55,4.3,nan",
    "random,40,0,300,30,1.1,1.5,0.9,1.44,3.1,nan",
    "random,40,1,300,30,1.3,1.7,1.1,1.64,3.3,nan",
  ]);
}

/** Loss warms up after episode 1; episode 0 logs nan. */
export function sampleMetrics(): string {
  return metricsCsv([
    "seed,20,0,0,1.0,2.0,0.5,1.85,6.0,nan",
    "seed,20,0,1,1.1,2.1,0.6,1.95,6.1,12.8125",
    "seed,20,0,2,1.2,2.2,0.7,2.05,6.2,4.25",
    "seed,20,0,3,1.3,2.3,0.8,2.15,6.3,0.107421875",
    "seed,20,1,0,1.0,2.0,0.5,1.85,6.0,nan",
    "seed,20,1,1,1.1,2.1,0.6,1.95,6.1,10.5",
    "seed,20,1,2,1.2,2.2,0.7,2.05,6.2,2.125",
    "random,20,0,0,0.5,1.0,0.3,0.97,3.0,nan",
    "random,20,0,1,0.6,1.1,0.4,1.07,3.1,nan",
  ]);
}
