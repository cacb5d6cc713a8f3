/**
 * Seeded randomness for deterministic simulation replies.
 *
 * mulberry32 keeps the whole state in one 32-bit word, so identical seeds
 * produce identical streams on every platform; gaussians come from
 * Box-Muller over consecutive uniforms.
 */

export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Standard normal generator over a uniform source (Box-Muller, cached pair). */
export function gaussian(next: () => number): () => number {
  let spare: number | null = null;
  return () => {
    if (spare !== null) {
      const value = spare;
      spare = null;
      return value;
    }
    const u1 = 1.0 - next(); // (0, 1]: keeps the log finite
    const u2 = next();
    const radius = Math.sqrt(-2.0 * Math.log(u1));
    spare = radius * Math.sin(2.0 * Math.PI * u2);
    return radius * Math.cos(2.0 * Math.PI * u2);
  };
}
