/**
 * Test harness: spawns the real hub server (`python -m roomcast.cli serve`)
 * in virtual-clock mode and provides raw WebSocket clients for driving and
 * recording.
 */

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import WebSocket from "ws";

export interface HubProcess {
  port: number;
  proc: ChildProcess;
  stop(): Promise<void>;
}

export async function startHub(): Promise<HubProcess> {
  const dir = mkdtempSync(join(tmpdir(), "roomcast-ui-"));
  const configPath = join(dir, "engine.json");
  writeFileSync(configPath, JSON.stringify({ preferences_path: join(dir, "prefs.json") }));
  const port = 20000 + Math.floor(Math.random() * 20000);
  const proc = spawn(
    "python3",
    ["-m", "roomcast.cli", "serve", configPath, "--port", String(port), "--clock", "virtual"],
    { stdio: ["ignore", "ignore", "pipe"] },
  );
  const stderr: string[] = [];
  proc.stderr?.on("data", (chunk) => stderr.push(String(chunk)));

  for (let attempt = 0; attempt < 120; attempt += 1) {
    if (proc.exitCode !== null) {
      throw new Error(`hub exited early (rc ${proc.exitCode}):\n${stderr.join("")}`);
    }
    try {
      const response = await fetch(`http://127.0.0.1:${port}/healthz`);
      if (response.ok) break;
    } catch {
      await sleep(250);
    }
  }

  return {
    port,
    proc,
    stop: () =>
      new Promise<void>((resolve) => {
        proc.once("exit", () => resolve());
        proc.kill("SIGINT");
        setTimeout(() => {
          proc.kill("SIGKILL");
        }, 5000).unref();
      }),
  };
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

/** A bare protocol client: records every raw frame, no UI code involved. */
export class RawClient {
  readonly frames: string[] = [];
  private socket: WebSocket;
  private seq = 0;
  private opened: Promise<void>;

  constructor(port: number) {
    this.socket = new WebSocket(`ws://127.0.0.1:${port}/ws`);
    this.socket.on("message", (data) => this.frames.push(String(data)));
    this.opened = new Promise((resolve, reject) => {
      this.socket.once("open", () => resolve());
      this.socket.once("error", reject);
    });
  }

  async ready(): Promise<void> {
    await this.opened;
  }

  send(type: string, payload: Record<string, unknown>): void {
    this.seq += 1;
    this.socket.send(JSON.stringify({ type, seq: this.seq, payload }));
  }

  /** Raw frames with the given message type, parsed. */
  ofType(type: string): Record<string, unknown>[] {
    return this.frames
      .map((frame) => JSON.parse(frame) as Record<string, unknown>)
      .filter((message) => message["type"] === type);
  }

  streamFrames(): string[] {
    return this.frames.filter((frame) => {
      const type = (JSON.parse(frame) as { type: string }).type;
      return type === "snapshot" || type === "diff";
    });
  }

  async waitFor(predicate: () => boolean, timeoutMs = 10_000): Promise<void> {
    const deadline = Date.now() + timeoutMs;
    while (!predicate()) {
      if (Date.now() > deadline) {
        throw new Error(`condition not met within ${timeoutMs} ms; frames:\n${this.frames.join("\n")}`);
      }
      await sleep(25);
    }
  }

  close(): void {
    this.socket.close();
  }
}
