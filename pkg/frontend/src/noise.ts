/** Counter-mode white noise, identical to the simulator's stream.
 *
 * Sample i of a seeded stream is a pure function of (seed, i): the 64-bit
 * counter seed + (i+1)*GAMMA is scrambled by the splitmix64 finalizer and
 * the top 53 bits become a double in [0, 1). BigInt keeps the integer steps
 * exact; the float conversion is the same IEEE rounding the server does, so
 * both sides produce bit-identical samples.
 */

const GAMMA = 0x9e3779b97f4a7c15n;
const MIX1 = 0xbf58476d1ce4e5b9n;
const MIX2 = 0x94d049bb133111ebn;
const MASK64 = (1n << 64n) - 1n;
const INV_2_53 = 1 / 9007199254740992;

/** Seeds arrive over JSON as numbers; tests may pass decimal strings. */
export function toSeed(seed: number | string | bigint): bigint {
  return BigInt(seed) & MASK64;
}

export function noiseU01(seed: bigint, index: number | bigint): number {
  let z = (seed + (BigInt(index) + 1n) * GAMMA) & MASK64;
  z = ((z ^ (z >> 30n)) * MIX1) & MASK64;
  z = ((z ^ (z >> 27n)) * MIX2) & MASK64;
  z = z ^ (z >> 31n);
  return Number(z >> 11n) * INV_2_53;
}

/** Uniform in [-1, 1). */
export function noiseSample(seed: bigint, index: number | bigint): number {
  return 2 * noiseU01(seed, index) - 1;
}
