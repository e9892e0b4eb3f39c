#!/usr/bin/env node
import * as readline from "node:readline";
import { AdapterSession, DEFAULT_CLASSES } from "./server.js";

function classesFromArgv(argv: string[]): string[] {
  const idx = argv.indexOf("--classes");
  if (idx >= 0 && argv[idx + 1]) {
    return argv[idx + 1].split(",");
  }
  return DEFAULT_CLASSES;
}

const session = new AdapterSession(classesFromArgv(process.argv.slice(2)));
const rl = readline.createInterface({ input: process.stdin, terminal: false });

rl.on("line", (line) => {
  const reply = session.handleLine(line);
  if (reply !== null) {
    process.stdout.write(JSON.stringify(reply) + "\n");
  }
});

rl.on("close", () => {
  process.exit(0);
});
