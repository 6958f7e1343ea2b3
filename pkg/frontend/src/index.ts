/**
 * Thin client for the langfeed wire protocol.
 *
 * One Client owns one TCP connection and therefore one server session.
 * Every reset/step performs exactly one request/response round-trip, and
 * bundle fields are passed through verbatim: the SDK never re-verbalizes
 * or transforms server text.
 */

import * as net from "net";
import * as readline from "readline";

import { ConnectionLostError, errorFromCode, EpisodeOverError } from "./errors";

export * from "./errors";

export interface EnvConfigInput {
  env_id: string;
  instruction_type?: "b" | "p" | "c";
  feedback?: string;
  randomize_text?: boolean;
  randomize_latent?: boolean;
  seed?: number;
  horizon_override?: number | null;
}

export interface ObservationBundle {
  observation: string;
  instruction: string;
  feedback: string;
}

export interface StepResult {
  bundle: ObservationBundle;
  done: boolean;
  terminated: boolean;
  truncated: boolean;
}

interface ObservationFrame {
  type: "observation";
  observation: string;
  instruction: string;
  feedback: string;
  done: boolean;
  terminated: boolean;
  truncated: boolean;
}

type ResponseFrame =
  | ObservationFrame
  | { type: "ok"; session_id: string | null }
  | { type: "error"; code: string; message: string };

interface Pending {
  resolve: (frame: ResponseFrame) => void;
  reject: (error: Error) => void;
}

export class Client {
  private socket: net.Socket;
  private pending: Pending[] = [];
  private closed = false;

  private constructor(socket: net.Socket) {
    this.socket = socket;
    const lines = readline.createInterface({ input: socket });
    lines.on("line", (line) => {
      const waiter = this.pending.shift();
      if (!waiter) return; // unsolicited line; protocol is strictly 1:1
      try {
        waiter.resolve(JSON.parse(line) as ResponseFrame);
      } catch (err) {
        waiter.reject(new ConnectionLostError(`unparseable server line: ${line}`));
      }
    });
    const fail = (reason: string) => () => {
      this.closed = true;
      while (this.pending.length > 0) {
        this.pending.shift()!.reject(new ConnectionLostError(reason));
      }
    };
    socket.on("close", fail("connection closed"));
    socket.on("error", fail("connection error"));
  }

  /** Connect to `host:port` (or a `tcp:host:port` endpoint string). */
  static connect(endpoint: string): Promise<Client>;
  static connect(host: string, port: number): Promise<Client>;
  static connect(hostOrEndpoint: string, port?: number): Promise<Client> {
    let host = hostOrEndpoint;
    let targetPort = port;
    if (targetPort === undefined) {
      const text = hostOrEndpoint.startsWith("tcp:")
        ? hostOrEndpoint.slice(4)
        : hostOrEndpoint;
      const sep = text.lastIndexOf(":");
      host = text.slice(0, sep);
      targetPort = Number(text.slice(sep + 1));
    }
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port: targetPort! });
      socket.once("connect", () => resolve(new Client(socket)));
      socket.once("error", (err) => reject(new ConnectionLostError(String(err))));
    });
  }

  request(payload: Record<string, unknown>): Promise<ResponseFrame> {
    if (this.closed) {
      return Promise.reject(new ConnectionLostError("client is closed"));
    }
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.socket.write(JSON.stringify(payload) + "\n");
    });
  }

  private async expect(payload: Record<string, unknown>): Promise<ResponseFrame> {
    const frame = await this.request(payload);
    if (frame.type === "error") {
      throw errorFromCode(frame.code, frame.message);
    }
    return frame;
  }

  /** Create the session's environment; returns a handle in unreset state. */
  async make(config: EnvConfigInput): Promise<RemoteEnv> {
    const frame = await this.expect({ op: "make", config });
    if (frame.type !== "ok") {
      throw new ConnectionLostError(`expected ok frame, got ${frame.type}`);
    }
    return new RemoteEnv(this, frame.session_id ?? "");
  }

  async makeObservation(payload: Record<string, unknown>): Promise<ObservationFrame> {
    const frame = await this.expect(payload);
    if (frame.type !== "observation") {
      throw new ConnectionLostError(`expected observation frame, got ${frame.type}`);
    }
    return frame;
  }

  async close(): Promise<void> {
    if (!this.closed) {
      try {
        await this.request({ op: "close" });
      } catch {
        // Closing a dying connection is fine.
      }
    }
    this.closed = true;
    this.socket.destroy();
  }
}

/** Remote environment handle: gym-style reset/step over one session. */
export class RemoteEnv {
  readonly sessionId: string;
  private client: Client;
  private _done = false;
  private _lastBundle: ObservationBundle | null = null;

  constructor(client: Client, sessionId: string) {
    this.client = client;
    this.sessionId = sessionId;
  }

  /** Last bundle received from the server, verbatim. */
  get lastBundle(): ObservationBundle | null {
    return this._lastBundle;
  }

  /** Whether the current episode has ended (mirrors server state). */
  get done(): boolean {
    return this._done;
  }

  async reset(seed?: number): Promise<ObservationBundle> {
    const payload: Record<string, unknown> = { op: "reset" };
    if (seed !== undefined) payload.seed = seed;
    const frame = await this.client.makeObservation(payload);
    this._done = frame.done;
    this._lastBundle = {
      observation: frame.observation,
      instruction: frame.instruction,
      feedback: frame.feedback,
    };
    return this._lastBundle;
  }

  /**
   * One action, one round-trip.  Throws EpisodeOverError on step-after-done
   * (the server is still consulted, so the error carries its exact code).
   */
  async step(action: string): Promise<StepResult> {
    const frame = await this.client.makeObservation({ op: "step", action });
    this._done = frame.done;
    this._lastBundle = {
      observation: frame.observation,
      instruction: frame.instruction,
      feedback: frame.feedback,
    };
    return {
      bundle: this._lastBundle,
      done: frame.done,
      terminated: frame.terminated,
      truncated: frame.truncated,
    };
  }
}

/** Shorthand: connect and make in one call. */
export async function connect(endpoint: string): Promise<Client> {
  return Client.connect(endpoint);
}

// Re-exported so callers can narrow on it without re-importing.
export { EpisodeOverError };
