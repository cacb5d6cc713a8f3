/**
 * Least squares with an intercept, solved via the normal equations.
 *
 * Demonstration-grade numerics on purpose: the adapter must have zero
 * dependencies, and the protocol conformance suite only exercises small,
 * well-conditioned problems. Near-singular systems fall back to a tiny
 * (1e-12) ridge on the Gram matrix instead of failing.
 */
import { gaussian, mulberry32 } from "./rng";

const RIDGE = 1e-12;

export class ModelError extends Error {}

function solve(a: number[][], b: number[]): number[] {
  const n = b.length;
  const m = a.map((row, i) => [...row, b[i]!]);
  for (let col = 0; col < n; col++) {
    let pivot = col;
    for (let r = col + 1; r < n; r++) {
      if (Math.abs(m[r]![col]!) > Math.abs(m[pivot]![col]!)) pivot = r;
    }
    if (Math.abs(m[pivot]![col]!) < RIDGE) {
      throw new ModelError("singular normal equations");
    }
    [m[col], m[pivot]] = [m[pivot]!, m[col]!];
    const inv = 1.0 / m[col]![col]!;
    for (let c = col; c <= n; c++) m[col]![c]! *= inv;
    for (let r = 0; r < n; r++) {
      if (r === col || m[r]![col] === 0) continue;
      const factor = m[r]![col]!;
      for (let c = col; c <= n; c++) m[r]![c]! -= factor * m[col]![c]!;
    }
  }
  return m.map((row) => row[n]!);
}

export class LeastSquares {
  private beta: number[] | null = null;
  private fitted: number[] | null = null;
  private rmse = 0;

  get isFitted(): boolean {
    return this.beta !== null;
  }

  get featureCount(): number {
    if (this.beta === null) throw new ModelError("model is not fitted");
    return this.beta.length - 1;
  }

  fit(x: number[][], y: number[]): void {
    if (x.length !== y.length || x.length === 0) {
      throw new ModelError("x rows and y length must agree and be non-empty");
    }
    const rows = x.map((row) => [1.0, ...row]);
    const k = rows[0]!.length;
    if (rows.some((row) => row.length !== k)) {
      throw new ModelError("x must be rectangular");
    }
    const xtx: number[][] = Array.from({ length: k }, () => new Array(k).fill(0));
    const xty: number[] = new Array(k).fill(0);
    for (let r = 0; r < rows.length; r++) {
      const row = rows[r]!;
      for (let i = 0; i < k; i++) {
        xty[i]! += row[i]! * y[r]!;
        for (let j = i; j < k; j++) xtx[i]![j]! += row[i]! * row[j]!;
      }
    }
    for (let i = 0; i < k; i++) {
      for (let j = 0; j < i; j++) xtx[i]![j] = xtx[j]![i]!;
    }
    let beta: number[];
    try {
      beta = solve(xtx, xty);
    } catch {
      const ridged = xtx.map((row, i) =>
        row.map((v, j) => (i === j ? v + RIDGE : v)),
      );
      beta = solve(ridged, xty);
    }
    this.beta = beta;
    this.fitted = rows.map((row) =>
      row.reduce((acc, v, j) => acc + v * beta[j]!, 0),
    );
    const dof = Math.max(y.length - k, 1);
    const rss = y.reduce(
      (acc, yi, i) => acc + (yi - this.fitted![i]!) ** 2,
      0,
    );
    this.rmse = Math.sqrt(rss / dof);
  }

  predict(x: number[][]): number[] {
    if (this.beta === null) throw new ModelError("predict before fit");
    const beta = this.beta;
    return x.map((row) => {
      if (row.length !== beta.length - 1) {
        throw new ModelError(
          `predict expects ${beta.length - 1} columns, got ${row.length}`,
        );
      }
      return row.reduce((acc, v, j) => acc + v * beta[j + 1]!, beta[0]!);
    });
  }

  /** m response vectors: fitted values plus N(0, fit RMSE) noise. */
  simulate(m: number, seed: number): number[][] {
    if (this.fitted === null) throw new ModelError("simulate before fit");
    const fitted = this.fitted;
    const draw = gaussian(mulberry32(seed));
    const out: number[][] = [];
    for (let j = 0; j < m; j++) {
      out.push(fitted.map((f) => f + this.rmse * draw()));
    }
    return out;
  }
}
