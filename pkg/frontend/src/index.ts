/**
 * TypeScript client for the motorgym drive-simulation bridge.
 *
 * The client spawns `python -m motorgym.bridge` and talks line-delimited
 * JSON over stdio. Floats cross the boundary in shortest round-trip form,
 * so observations and rewards received here are bit-identical to what a
 * native Python loop would see.
 *
 * ```ts
 * const bridge = await DriveBridge.launch();
 * const env = await bridge.make("series-cont-v0", { episode_length: 5000 });
 * let obs = await env.reset(42);
 * const { observation, reward, done } = await env.step(0.5);
 * await env.close();
 * await bridge.shutdown();
 * ```
 */

import { spawn, type ChildProcessByStdio } from "node:child_process";
import { createInterface, type Interface } from "node:readline";
import type { Readable, Writable } from "node:stream";

/** Error raised by the Python side, preserving its exception type name. */
export class BridgeError extends Error {
  constructor(
    readonly kind: string,
    message: string,
  ) {
    super(message);
    this.name = kind;
  }
}

export interface DiscreteActionSpace {
  kind: "discrete";
  channels: number;
  /** Command count per channel (e.g. [8] for the three-phase bridge). */
  cardinalities: number[];
}

export interface ContinuousActionSpace {
  kind: "continuous";
  channels: number;
  /** Per-channel duty-cycle bounds. */
  low: number[];
  high: number[];
}

export type ActionSpace = DiscreteActionSpace | ContinuousActionSpace;

export interface ObservationSpace {
  kind: "box";
  low: number[];
  high: number[];
}

/** Scalar duty/command for single-channel drives, array otherwise. */
export type Action = number | number[];

export interface StepResult {
  observation: number[];
  reward: number;
  done: boolean;
  info: Record<string, unknown>;
}

export interface LaunchOptions {
  /** Python interpreter to run (default: $MOTORGYM_PYTHON or "python3"). */
  pythonBin?: string;
  /** Extra arguments placed before `-m motorgym.bridge`. */
  pythonArgs?: string[];
  /** Working directory for the interpreter. */
  cwd?: string;
}

interface Pending {
  resolve: (value: Record<string, unknown>) => void;
  reject: (error: Error) => void;
}

type BridgeProcess = ChildProcessByStdio<Writable, Readable, Readable>;

/**
 * One bridge process. Requests are answered strictly in order, so the
 * client keeps a FIFO of pending promises.
 */
export class DriveBridge {
  private readonly pending: Pending[] = [];
  private stderrTail = "";
  private exited = false;

  private constructor(
    private readonly proc: BridgeProcess,
    lines: Interface,
  ) {
    lines.on("line", (line) => this.onLine(line));
    proc.stderr.on("data", (chunk: Buffer) => {
      this.stderrTail = (this.stderrTail + chunk.toString()).slice(-4000);
    });
    proc.on("exit", () => {
      this.exited = true;
      const reason = new BridgeError(
        "BridgeClosed",
        `bridge process exited${this.stderrTail ? `: ${this.stderrTail}` : ""}`,
      );
      for (const p of this.pending.splice(0)) p.reject(reason);
    });
  }

  static async launch(options: LaunchOptions = {}): Promise<DriveBridge> {
    const bin =
      options.pythonBin ?? process.env.MOTORGYM_PYTHON ?? "python3";
    const args = [...(options.pythonArgs ?? []), "-m", "motorgym.bridge"];
    const proc = spawn(bin, args, {
      cwd: options.cwd,
      stdio: ["pipe", "pipe", "pipe"],
    }) as BridgeProcess;
    await new Promise<void>((resolve, reject) => {
      proc.once("spawn", () => resolve());
      proc.once("error", (err) => reject(err));
    });
    const lines = createInterface({ input: proc.stdout });
    return new DriveBridge(proc, lines);
  }

  private onLine(line: string): void {
    const next = this.pending.shift();
    if (!next) return; // unsolicited output; nothing to pair it with
    let payload: Record<string, unknown>;
    try {
      payload = JSON.parse(line) as Record<string, unknown>;
    } catch {
      next.reject(new BridgeError("ProtocolError", `unparseable line: ${line}`));
      return;
    }
    if (payload.ok) {
      next.resolve(payload);
    } else {
      const err = (payload.error ?? {}) as { type?: string; message?: string };
      next.reject(
        new BridgeError(err.type ?? "BridgeError", err.message ?? line),
      );
    }
  }

  /** Low-level request; prefer {@link make} and the handle methods. */
  request(payload: object): Promise<Record<string, unknown>> {
    if (this.exited) {
      return Promise.reject(
        new BridgeError("BridgeClosed", "bridge process already exited"),
      );
    }
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.proc.stdin.write(JSON.stringify(payload) + "\n");
    });
  }

  /**
   * Construct an environment from its identifier
   * (`"<motor>-<cont|disc>-v0"`), optionally deep-merging configuration
   * overrides in the JSON file schema.
   */
  async make(envId: string, config?: object): Promise<EnvHandle> {
    const res = await this.request({ op: "make", env_id: envId, config });
    return new EnvHandle(
      this,
      res.handle as number,
      res.action_space as ActionSpace,
      res.observation_space as ObservationSpace,
      res.version as string,
    );
  }

  /** Stop the bridge process; all handles become unusable. */
  async shutdown(): Promise<void> {
    if (this.exited) return;
    try {
      await this.request({ op: "shutdown" });
    } finally {
      this.proc.stdin.end();
    }
  }

  /** Force-kill the process without the shutdown handshake. */
  dispose(): void {
    if (!this.exited) this.proc.kill();
  }
}

/** One environment instance living inside the bridge process. */
export class EnvHandle {
  private closed = false;

  constructor(
    private readonly bridge: DriveBridge,
    readonly handle: number,
    readonly actionSpace: ActionSpace,
    readonly observationSpace: ObservationSpace,
    /** Version of the simulation core serving this handle. */
    readonly version: string,
  ) {}

  /** Start a new episode; returns the initial observation. */
  async reset(seed?: number): Promise<number[]> {
    const res = await this.bridge.request({
      op: "reset",
      handle: this.handle,
      seed,
    });
    return res.observation as number[];
  }

  /** Advance the drive by one sampling period. */
  async step(action: Action): Promise<StepResult> {
    const res = await this.bridge.request({
      op: "step",
      handle: this.handle,
      action,
    });
    return {
      observation: res.observation as number[],
      reward: res.reward as number,
      done: res.done as boolean,
      info: res.info as Record<string, unknown>,
    };
  }

  /** Release the instance; closing twice is a no-op. */
  async close(): Promise<void> {
    if (this.closed) return;
    this.closed = true;
    await this.bridge.request({ op: "close", handle: this.handle });
  }
}
