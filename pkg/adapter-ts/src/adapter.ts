#!/usr/bin/env node
/**
 * Entry point: serve the JSON-lines model protocol on stdin/stdout until
 * EOF. Stdout carries protocol replies only; anything else goes to stderr.
 */
import * as readline from "readline";
import { AdapterServer } from "./server";

export function serve(): void {
  const server = new AdapterServer();
  const rl = readline.createInterface({ input: process.stdin, terminal: false });
  rl.on("line", (line) => {
    if (line.trim().length === 0) return;
    process.stdout.write(server.handleLine(line) + "\n");
  });
  rl.on("close", () => {
    process.exit(0);
  });
}

if (require.main === module) {
  serve();
}
