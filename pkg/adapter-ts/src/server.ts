/**
 * Protocol handling: one JSON request line in, exactly one JSON reply line
 * out. Malformed input never kills the session; it produces an
 * {"ok":false,...} reply and the loop keeps serving.
 */
import { LeastSquares, ModelError } from "./ols";

export const ADAPTER_NAME = "ts-least-squares";
export const CAPABILITIES = ["fit", "predict", "simulate"] as const;

export type Reply =
  | ({ ok: true } & Record<string, unknown>)
  | { ok: false; error: string };

function isFiniteVector(value: unknown): value is number[] {
  return (
    Array.isArray(value) &&
    value.every((v) => typeof v === "number" && Number.isFinite(v))
  );
}

function isFiniteMatrix(value: unknown): value is number[][] {
  return Array.isArray(value) && value.length > 0 && value.every(isFiniteVector);
}

export class AdapterServer {
  private model = new LeastSquares();

  handle(message: unknown): Reply {
    if (typeof message !== "object" || message === null ||
        Array.isArray(message)) {
      return { ok: false, error: "request must be a JSON object" };
    }
    const msg = message as Record<string, unknown>;
    switch (msg.cmd) {
      case "hello":
        return { ok: true, name: ADAPTER_NAME, capabilities: [...CAPABILITIES] };
      case "fit": {
        if (!isFiniteMatrix(msg.x) || !isFiniteVector(msg.y)) {
          return { ok: false, error: "fit requires finite 'x' matrix and 'y' vector" };
        }
        return this.guard(() => {
          this.model.fit(msg.x as number[][], msg.y as number[]);
          return { ok: true };
        });
      }
      case "predict": {
        if (msg.x !== undefined && !isFiniteMatrix(msg.x) &&
            !(Array.isArray(msg.x) && msg.x.length === 0)) {
          return { ok: false, error: "predict requires a finite 'x' matrix" };
        }
        return this.guard(() => ({
          ok: true,
          yhat: this.model.predict((msg.x as number[][]) ?? []),
        }));
      }
      case "simulate": {
        const m = msg.m;
        const seed = msg.seed;
        if (typeof m !== "number" || !Number.isInteger(m) || m < 0) {
          return { ok: false, error: "simulate requires a non-negative integer 'm'" };
        }
        if (typeof seed !== "number" || !Number.isInteger(seed)) {
          return { ok: false, error: "simulate requires an integer 'seed'" };
        }
        return this.guard(() => ({
          ok: true,
          ysim: this.model.simulate(m, seed),
        }));
      }
      default:
        return { ok: false, error: `unknown cmd ${JSON.stringify(msg.cmd)}` };
    }
  }

  /** Parse and dispatch one wire line; the reply is always single-line JSON. */
  handleLine(line: string): string {
    let message: unknown;
    try {
      message = JSON.parse(line);
    } catch {
      return JSON.stringify({ ok: false, error: "malformed JSON request" });
    }
    return JSON.stringify(this.handle(message));
  }

  private guard(run: () => Reply): Reply {
    try {
      return run();
    } catch (err) {
      if (err instanceof ModelError) return { ok: false, error: err.message };
      throw err;
    }
  }
}
